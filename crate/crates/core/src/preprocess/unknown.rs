//! Unknown-word guessing: hypothesize a nominal root plus an inflectional
//! suffix tail, checking attachment conditions and vowel harmony.
//!
//! Text is assumed to be in the ASCII transliteration where `I`=ı, `U`=ü,
//! `O`=ö, `C`=ç, `S`=ş, `G`=ğ; other capitals are ordinary capital letters.

use super::PreprocessError;
use crate::model::{LinearItem, LinearParse};

/// Attachment condition of a suffix variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cond {
    /// `a`: attaches to anything.
    Any,
    /// `v`: attaches after a vowel.
    AfterVowel,
    /// `c`: attaches after a consonant.
    AfterConsonant,
    /// `d`: attaches after a vowel or voiced consonant.
    AfterVoiced,
    /// `t`: attaches after a voiceless consonant.
    AfterVoiceless,
}

impl Cond {
    fn from_code(code: &str) -> Option<Cond> {
        match code {
            "a" => Some(Cond::Any),
            "v" => Some(Cond::AfterVowel),
            "c" => Some(Cond::AfterConsonant),
            "d" => Some(Cond::AfterVoiced),
            "t" => Some(Cond::AfterVoiceless),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Variant {
    pub form: String,
    pub cond: Cond,
}

/// All surface variants realizing one suffix value (e.g. possessive `1SG`).
#[derive(Debug, Clone)]
pub struct SuffixEntry {
    pub value: String,
    pub variants: Vec<Variant>,
}

/// Nominal inflection inventory: plural agreement, possessive, case, and the
/// relativizer attaching after locative/genitive.
#[derive(Debug, Clone, Default)]
pub struct SuffixInventory {
    pub agr: Vec<SuffixEntry>,
    pub poss: Vec<SuffixEntry>,
    pub case: Vec<SuffixEntry>,
    pub rel: Vec<Variant>,
}

impl SuffixInventory {
    /// Parse the inventory format: `slot value form:cond(,form:cond)*` per
    /// line, `#` comments.
    pub fn parse(text: &str) -> Result<SuffixInventory, PreprocessError> {
        let mut inv = SuffixInventory::default();
        for (ln, line) in text.lines().enumerate() {
            let err = |msg: &str| PreprocessError::Inventory { line: ln + 1, msg: msg.to_string() };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let slot = fields.next().ok_or_else(|| err("missing slot"))?;
            let value = fields.next().ok_or_else(|| err("missing value"))?.to_string();
            let spec = fields.next().ok_or_else(|| err("missing variants"))?;
            let mut variants = Vec::new();
            for piece in spec.split(',') {
                let (form, code) = piece
                    .split_once(':')
                    .ok_or_else(|| err("variant must be `form:cond`"))?;
                let cond = Cond::from_code(code).ok_or_else(|| err("unknown condition code"))?;
                if form.is_empty() {
                    return Err(err("empty variant form"));
                }
                variants.push(Variant { form: form.to_string(), cond });
            }
            match slot {
                "agr" => inv.agr.push(SuffixEntry { value, variants }),
                "poss" => inv.poss.push(SuffixEntry { value, variants }),
                "case" => inv.case.push(SuffixEntry { value, variants }),
                "rel" => inv.rel.extend(variants),
                other => return Err(err(&format!("unknown slot `{other}`"))),
            }
        }
        Ok(inv)
    }

    /// The built-in nominal inflection inventory.
    pub fn standard() -> SuffixInventory {
        SuffixInventory::parse(include_str!("../../data/suffixes.txt"))
            .expect("built-in suffix inventory must parse")
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'I' | 'U' | 'O' | 'A' | 'E')
}

fn is_front(c: char) -> bool {
    matches!(c, 'e' | 'i' | 'O' | 'U' | 'E')
}

fn is_round(c: char) -> bool {
    matches!(c, 'o' | 'u' | 'O' | 'U')
}

fn is_high(c: char) -> bool {
    matches!(c, 'I' | 'i' | 'u' | 'U')
}

fn is_voiceless(c: char) -> bool {
    matches!(c, 'f' | 's' | 't' | 'k' | 'h' | 'p' | 'C' | 'S' | 'F' | 'T' | 'K' | 'H' | 'P')
}

/// Normalize a letter for phonology: the transliteration capitals `I U O C S
/// G` stand for special letters and are kept; any other capital is an
/// ordinary letter and lowercased.
fn phono(c: char) -> char {
    if matches!(c, 'I' | 'U' | 'O' | 'C' | 'S' | 'G') { c } else { c.to_ascii_lowercase() }
}

fn last_letter(consumed: &str) -> Option<char> {
    consumed.chars().rev().find(|c| c.is_alphabetic()).map(phono)
}

fn last_vowel(consumed: &str) -> Option<char> {
    consumed.chars().rev().map(phono).find(|c| is_vowel(*c))
}

fn cond_ok(cond: Cond, prev: Option<char>) -> bool {
    let Some(p) = prev else { return cond == Cond::Any };
    match cond {
        Cond::Any => true,
        Cond::AfterVowel => is_vowel(p),
        Cond::AfterConsonant => !is_vowel(p),
        Cond::AfterVoiced => is_vowel(p) || !is_voiceless(p),
        Cond::AfterVoiceless => !is_vowel(p) && is_voiceless(p),
    }
}

/// Vowel harmony: each suffix vowel agrees in frontness with the preceding
/// vowel, and high suffix vowels also agree in roundness. The anchor advances
/// through the suffix itself.
fn harmony_ok(form: &str, anchor: Option<char>) -> bool {
    let mut anchor = anchor;
    for c in form.chars().map(phono) {
        if !is_vowel(c) {
            continue;
        }
        if let Some(a) = anchor {
            if is_front(c) != is_front(a) {
                return false;
            }
            if is_high(c) && is_round(c) != is_round(a) {
                return false;
            }
        }
        anchor = Some(c);
    }
    true
}

/// How strictly suffix attachment is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Attachment conditions and vowel harmony.
    Strict,
    /// Attachment conditions only (fallback for foreign/irregular roots).
    NoHarmony,
    /// Neither (used for suffixes attached to digits, whose phonology follows
    /// the pronunciation rather than the written form).
    Lenient,
}

/// One way of reading a suffix tail as nominal inflection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailAnalysis {
    pub agr: String,
    pub poss: String,
    pub case: String,
    /// The relativizer was consumed after a locative/genitive.
    pub rel: bool,
}

impl Default for TailAnalysis {
    fn default() -> Self {
        TailAnalysis { agr: "3SG".into(), poss: "NONE".into(), case: "nom".into(), rel: false }
    }
}

/// Enumerate all readings of `tail` as agreement < possessive < case (< rel),
/// each slot optional, attached after `root`.
pub fn parse_tail(
    root: &str,
    tail: &str,
    inv: &SuffixInventory,
    strictness: Strictness,
) -> Vec<TailAnalysis> {
    let mut out = Vec::new();
    let mut consumed = root.to_string();
    recurse(&mut consumed, tail, 0, &TailAnalysis::default(), inv, strictness, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    consumed: &mut String,
    rest: &str,
    rank: u8,
    acc: &TailAnalysis,
    inv: &SuffixInventory,
    strictness: Strictness,
    out: &mut Vec<TailAnalysis>,
) {
    if rest.is_empty() {
        out.push(acc.clone());
        return;
    }
    let prev = last_letter(consumed);
    let anchor = last_vowel(consumed);
    let variant_fits = |v: &Variant| {
        if !rest.starts_with(&v.form) {
            return false;
        }
        match strictness {
            Strictness::Lenient => true,
            Strictness::NoHarmony => cond_ok(v.cond, prev),
            Strictness::Strict => cond_ok(v.cond, prev) && harmony_ok(&v.form, anchor),
        }
    };
    let mut step = |form: &str, next_rank: u8, next_acc: &TailAnalysis| {
        let len_before = consumed.len();
        consumed.push_str(form);
        recurse(consumed, &rest[form.len()..], next_rank, next_acc, inv, strictness, out);
        consumed.truncate(len_before);
    };
    if rank < 1 {
        for entry in &inv.agr {
            for v in entry.variants.iter().filter(|v| variant_fits(v)) {
                let next = TailAnalysis { agr: entry.value.clone(), ..acc.clone() };
                step(&v.form, 1, &next);
            }
        }
    }
    if rank < 2 {
        for entry in &inv.poss {
            for v in entry.variants.iter().filter(|v| variant_fits(v)) {
                let next = TailAnalysis { poss: entry.value.clone(), ..acc.clone() };
                step(&v.form, 2, &next);
            }
        }
    }
    if rank < 3 {
        for entry in &inv.case {
            for v in entry.variants.iter().filter(|v| variant_fits(v)) {
                let next = TailAnalysis { case: entry.value.clone(), ..acc.clone() };
                step(&v.form, 3, &next);
            }
        }
    }
    if rank == 3 && (acc.case == "loc" || acc.case == "gen") {
        for v in inv.rel.iter().filter(|v| variant_fits(v)) {
            let next = TailAnalysis { rel: true, ..acc.clone() };
            step(&v.form, 4, &next);
        }
    }
}

fn nominal_parse(root: &str, proper: bool, ta: &TailAnalysis) -> Vec<LinearParse> {
    let mut lp = LinearParse::new();
    lp.items.push(LinearItem::Feature("cat".into(), "noun".into()));
    lp.items.push(LinearItem::Feature("root".into(), root.into()));
    if proper {
        lp.items.push(LinearItem::Feature("type".into(), "proper".into()));
    }
    lp.items.push(LinearItem::Feature("agr".into(), ta.agr.clone()));
    lp.items.push(LinearItem::Feature("poss".into(), ta.poss.clone()));
    lp.items.push(LinearItem::Feature("case".into(), ta.case.clone()));
    if !ta.rel {
        return vec![lp];
    }
    // relativized form: adjectival reading, plus a further nominal reading
    let mut adj = lp.clone();
    adj.items.push(LinearItem::Conv("adj".into(), "rel".into()));
    let mut noun = adj.clone();
    noun.items.push(LinearItem::Conv("noun".into(), "none".into()));
    noun.items.push(LinearItem::Feature("agr".into(), "3SG".into()));
    noun.items.push(LinearItem::Feature("poss".into(), "NONE".into()));
    noun.items.push(LinearItem::Feature("case".into(), "nom".into()));
    vec![adj, noun]
}

fn segmented(surface: &str, inv: &SuffixInventory, strictness: Strictness) -> Vec<LinearParse> {
    let mut out = Vec::new();
    if let Some(p) = surface.find('\'') {
        // an apostrophe fixes the root boundary and marks a proper noun;
        // the apostrophe stays in the root, as analyzer output does
        let root = &surface[..p + 1];
        let tail = &surface[p + 1..];
        if p > 0 {
            for ta in parse_tail(root, tail, inv, strictness) {
                out.extend(nominal_parse(root, true, &ta));
            }
        }
        return out;
    }
    let boundaries: Vec<usize> = surface.char_indices().map(|(i, _)| i).collect();
    // longer roots first; skip the whole-word split, which the caller adds
    for &k in boundaries.iter().skip(1).rev() {
        let (root, tail) = surface.split_at(k);
        for ta in parse_tail(root, tail, inv, strictness) {
            out.extend(nominal_parse(root, false, &ta));
        }
    }
    out
}

/// Guess nominal analyses for a word the analyzer does not know. Always
/// includes the whole surface as an uninflected root; segmentations are
/// checked with harmony first and, if that leaves only the bare reading,
/// retried without harmony.
pub fn guess_unknown(surface: &str, inv: &SuffixInventory) -> Vec<LinearParse> {
    let mut segments = segmented(surface, inv, Strictness::Strict);
    if segments.is_empty() {
        segments = segmented(surface, inv, Strictness::NoHarmony);
    }
    let mut out = nominal_parse(surface, false, &TailAnalysis::default());
    out.extend(segments);
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|p| seen.insert(p.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> SuffixInventory {
        SuffixInventory::standard()
    }

    fn roots(parses: &[LinearParse]) -> Vec<String> {
        parses
            .iter()
            .filter_map(|p| {
                p.items.iter().find_map(|i| match i {
                    LinearItem::Feature(n, v) if n == "root" => Some(v.clone()),
                    _ => None,
                })
            })
            .collect()
    }

    #[test]
    fn harmony_advances_through_the_suffix() {
        assert!(harmony_ok("leri", Some('O')));
        assert!(!harmony_ok("lari", Some('O')));
        assert!(harmony_ok("un", Some('o')));
        assert!(!harmony_ok("in", Some('o')));
        assert!(harmony_ok("de", None));
    }

    #[test]
    fn attachment_conditions_gate_variants() {
        let found = parse_tail("kitap", "ta", &inv(), Strictness::Strict);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].case, "loc");
        assert!(parse_tail("kitap", "da", &inv(), Strictness::Strict).is_empty());
        assert_eq!(parse_tail("masa", "da", &inv(), Strictness::Strict).len(), 1);
    }

    #[test]
    fn suffix_order_is_agreement_possessive_case() {
        let found = parse_tail("ev", "lerinde", &inv(), Strictness::Strict);
        // ev-ler-i-nde, ev-ler-in-de, ev-leri-nde
        assert_eq!(found.len(), 3);
        assert!(found.iter().any(|t| t.agr == "3PL" && t.poss == "3SG" && t.case == "loc"));
        assert!(found.iter().any(|t| t.agr == "3PL" && t.poss == "2SG" && t.case == "loc"));
        assert!(found.iter().any(|t| t.agr == "3SG" && t.poss == "3PL" && t.case == "loc"));
        assert!(parse_tail("ev", "deler", &inv(), Strictness::Strict).is_empty());
    }

    #[test]
    fn relativizer_needs_locative_or_genitive_and_doubles() {
        let parses = guess_unknown("kermezdere'deki", &inv());
        assert_eq!(parses.len(), 3);
        assert_eq!(roots(&parses), vec!["kermezdere'deki", "kermezdere'", "kermezdere'"]);
        let with_rel: Vec<_> = parses
            .iter()
            .filter(|p| p.items.contains(&LinearItem::Conv("adj".into(), "rel".into())))
            .collect();
        assert_eq!(with_rel.len(), 2);
        assert!(with_rel[1].items.contains(&LinearItem::Conv("noun".into(), "none".into())));
        assert!(parse_tail("ev", "ki", &inv(), Strictness::Strict).is_empty());
    }

    #[test]
    fn harmony_fallback_rescues_foreign_roots() {
        let parses = guess_unknown("carter'a", &inv());
        assert!(parses.iter().any(|p| {
            p.items.contains(&LinearItem::Feature("case".into(), "dat".into()))
                && p.items.contains(&LinearItem::Feature("type".into(), "proper".into()))
        }));
    }

    #[test]
    fn loanword_segmentations_are_exhaustive() {
        let parses = guess_unknown("talkshowumun", &inv());
        assert_eq!(parses.len(), 6);
        assert_eq!(
            roots(&parses),
            vec!["talkshowumun", "talkshowumu", "talkshowum", "talkshowum", "talkshowu", "talkshow"]
        );
    }
}
