//! Collocation recognition: consecutive tokens forming a unit are packed
//! into one token with a single (or filtered) parse before disambiguation.
//!
//! Sources of collocations:
//! - non-lexicalized patterns over parses, with a shared root (`_R`) or
//!   surface (`_W`) variable (e.g. duplicated optatives `koSa koSa`);
//! - fixed lexicalized word sequences with a ready-made parse;
//! - inflectable lexicalized sequences whose last word takes inflection
//!   (`devam ed…`);
//! - built-in shapes: dates, `yUzde` + number, and numeric ranges.

use super::{normalize_value, parse_linear, serialize_linear, PreprocessError, RawToken};
use crate::model::{LinearItem, LinearParse};

/// One condition on a token inside a non-lexicalized pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatItem {
    /// `[ROOT=_R]`: all tokens binding this must share one root.
    RootVar,
    RootLit(String),
    /// `[WORD=_W]`: all tokens binding this must share one surface.
    WordVar,
    WordLit(String),
    Feat(String, String),
    Conv(String, String),
}

/// A non-lexicalized pattern: per-token conditions plus an output parse in
/// which `%s` stands for the joined surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternEntry {
    pub tokens: Vec<Vec<PatItem>>,
    pub output: LinearParse,
}

/// A fixed lexicalized collocation: exact surfaces and an output parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedEntry {
    pub words: Vec<String>,
    pub output: LinearParse,
}

#[derive(Debug, Clone, Default)]
pub struct CollocationDb {
    pub patterns: Vec<PatternEntry>,
    pub fixed: Vec<FixedEntry>,
    /// Word sequences whose final word is a root that may carry inflection.
    pub inflectable: Vec<Vec<String>>,
    pub months: Vec<String>,
    /// The word that turns a following number into a percentage.
    pub percent_word: Option<String>,
}

fn parse_pattern_token(text: &str, err: &dyn Fn(&str) -> PreprocessError) -> Result<Vec<PatItem>, PreprocessError> {
    if !text.starts_with('[') || !text.ends_with(']') {
        return Err(err("expected bracketed items"));
    }
    let mut items = Vec::new();
    for item in text[1..text.len() - 1].split("][") {
        let (name, value) = item.split_once('=').ok_or_else(|| err("item without `=`"))?;
        let name = name.trim().to_ascii_lowercase();
        match name.as_str() {
            "root" if value == "_R" => items.push(PatItem::RootVar),
            "root" => items.push(PatItem::RootLit(value.to_string())),
            "word" if value == "_W" => items.push(PatItem::WordVar),
            "word" => items.push(PatItem::WordLit(value.to_string())),
            "conv" => {
                let (cat, suffix) = value.split_once('=').ok_or_else(|| err("bad conversion item"))?;
                items.push(PatItem::Conv(cat.to_ascii_lowercase(), suffix.to_ascii_lowercase()));
            }
            _ => items.push(PatItem::Feat(name.clone(), normalize_value(&name, value))),
        }
    }
    Ok(items)
}

fn serialize_pattern_token(items: &[PatItem]) -> String {
    let mut s = String::new();
    for item in items {
        match item {
            PatItem::RootVar => s.push_str("[ROOT=_R]"),
            PatItem::RootLit(r) => s.push_str(&format!("[ROOT={r}]")),
            PatItem::WordVar => s.push_str("[WORD=_W]"),
            PatItem::WordLit(w) => s.push_str(&format!("[WORD={w}]")),
            PatItem::Feat(n, v) => {
                let shown = if n == "root" { v.clone() } else { v.to_ascii_uppercase() };
                s.push_str(&format!("[{}={}]", n.to_ascii_uppercase(), shown));
            }
            PatItem::Conv(c, x) => {
                s.push_str(&format!("[CONV={}={}]", c.to_ascii_uppercase(), x.to_ascii_uppercase()));
            }
        }
    }
    s
}

impl CollocationDb {
    /// Parse the database format: `%% patterns` (pattern line, then output
    /// line), `%% fixed` (`words :: parse`), `%% inflectable`, `%% months`,
    /// `%% percent` sections; `#` comments.
    pub fn parse(text: &str) -> Result<CollocationDb, PreprocessError> {
        let mut db = CollocationDb::default();
        let mut section = String::new();
        let mut pending_pattern: Option<Vec<Vec<PatItem>>> = None;
        for (ln, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            let err = |msg: &str| PreprocessError::CollocDb { line: ln + 1, msg: msg.to_string() };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix("%%") {
                if pending_pattern.is_some() {
                    return Err(err("pattern entry is missing its output line"));
                }
                section = name.trim().to_string();
                continue;
            }
            match section.as_str() {
                "patterns" => {
                    if let Some(tokens) = pending_pattern.take() {
                        let output = parse_linear(line)
                            .map_err(|e| err(&format!("bad output parse: {e}")))?;
                        db.patterns.push(PatternEntry { tokens, output });
                    } else {
                        let mut tokens = Vec::new();
                        for tok in line.split_whitespace() {
                            tokens.push(parse_pattern_token(tok, &err)?);
                        }
                        if tokens.is_empty() {
                            return Err(err("empty pattern"));
                        }
                        pending_pattern = Some(tokens);
                    }
                }
                "fixed" => {
                    let (words, parse) = line.split_once("::").ok_or_else(|| err("expected `words :: parse`"))?;
                    let words: Vec<String> = words.split_whitespace().map(str::to_string).collect();
                    if words.len() < 2 {
                        return Err(err("a collocation needs at least two words"));
                    }
                    let output = parse_linear(parse.trim()).map_err(|e| err(&format!("bad parse: {e}")))?;
                    db.fixed.push(FixedEntry { words, output });
                }
                "inflectable" => {
                    let words: Vec<String> = line.split_whitespace().map(str::to_string).collect();
                    if words.len() < 2 {
                        return Err(err("a collocation needs at least two words"));
                    }
                    db.inflectable.push(words);
                }
                "months" => db.months.extend(line.split_whitespace().map(str::to_string)),
                "percent" => db.percent_word = Some(line.to_string()),
                _ => return Err(err("line outside any section")),
            }
        }
        if pending_pattern.is_some() {
            return Err(PreprocessError::CollocDb {
                line: text.lines().count(),
                msg: "pattern entry is missing its output line".into(),
            });
        }
        Ok(db)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if !self.patterns.is_empty() {
            out.push_str("%% patterns\n");
            for p in &self.patterns {
                let line: Vec<String> = p.tokens.iter().map(|t| serialize_pattern_token(t)).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
                out.push_str(&serialize_linear(&p.output));
                out.push('\n');
            }
        }
        if !self.fixed.is_empty() {
            out.push_str("%% fixed\n");
            for f in &self.fixed {
                out.push_str(&format!("{} :: {}\n", f.words.join(" "), serialize_linear(&f.output)));
            }
        }
        if !self.inflectable.is_empty() {
            out.push_str("%% inflectable\n");
            for w in &self.inflectable {
                out.push_str(&w.join(" "));
                out.push('\n');
            }
        }
        if !self.months.is_empty() {
            out.push_str("%% months\n");
            out.push_str(&self.months.join(" "));
            out.push('\n');
        }
        if let Some(p) = &self.percent_word {
            out.push_str("%% percent\n");
            out.push_str(p);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Binding {
    root: Option<String>,
    word: Option<String>,
}

fn parse_root(lp: &LinearParse) -> Option<&str> {
    lp.items.iter().find_map(|i| match i {
        LinearItem::Feature(n, v) if n == "root" => Some(v.as_str()),
        _ => None,
    })
}

fn check_parse(parse: Option<&LinearParse>, surface: &str, items: &[PatItem], b: &Binding) -> Option<Binding> {
    let mut b = b.clone();
    for item in items {
        match item {
            PatItem::Feat(n, v) => {
                let lp = parse?;
                let hit = lp.items.iter().any(|i| matches!(i, LinearItem::Feature(a, x) if a == n && x == v));
                if !hit {
                    return None;
                }
            }
            PatItem::Conv(c, x) => {
                let lp = parse?;
                if !lp.items.contains(&LinearItem::Conv(c.clone(), x.clone())) {
                    return None;
                }
            }
            PatItem::RootLit(r) => {
                if parse_root(parse?)? != r {
                    return None;
                }
            }
            PatItem::RootVar => {
                let r = parse_root(parse?)?.to_string();
                match &b.root {
                    Some(x) if *x != r => return None,
                    Some(_) => {}
                    None => b.root = Some(r),
                }
            }
            PatItem::WordLit(w) => {
                if surface != w {
                    return None;
                }
            }
            PatItem::WordVar => match &b.word {
                Some(x) if x != surface => return None,
                Some(_) => {}
                None => b.word = Some(surface.to_string()),
            },
        }
    }
    Some(b)
}

fn match_pattern(tokens: &[RawToken], entry: &PatternEntry) -> bool {
    fn dfs(tokens: &[RawToken], pats: &[Vec<PatItem>], b: &Binding) -> bool {
        let Some(items) = pats.first() else { return true };
        let token = &tokens[0];
        let parses: Vec<Option<&LinearParse>> = if token.parses.is_empty() {
            vec![None]
        } else {
            token.parses.iter().map(Some).collect()
        };
        for parse in parses {
            if let Some(next) = check_parse(parse, &token.surface, items, b) {
                if dfs(&tokens[1..], &pats[1..], &next) {
                    return true;
                }
            }
        }
        false
    }
    tokens.len() >= entry.tokens.len() && dfs(&tokens[..entry.tokens.len()], &entry.tokens, &Binding::default())
}

fn instantiate(output: &LinearParse, joined: &str) -> LinearParse {
    let mut lp = output.clone();
    for item in &mut lp.items {
        if let LinearItem::Feature(_, v) = item {
            *v = v.replace("%s", joined);
        }
    }
    lp
}

fn joined_surface(tokens: &[RawToken]) -> String {
    tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
}

fn packed(tokens: &[RawToken], parses: Vec<LinearParse>) -> RawToken {
    RawToken { surface: joined_surface(tokens), parses, unknown: false, collocation: true }
}

fn is_plain_number(t: &RawToken) -> bool {
    !t.surface.is_empty() && t.surface.chars().all(|c| c.is_ascii_digit())
}

fn is_numeric(t: &RawToken) -> bool {
    t.surface.starts_with(|c: char| c.is_ascii_digit())
        && t.parses.iter().all(|p| {
            p.items
                .iter()
                .any(|i| matches!(i, LinearItem::Feature(n, _) if n == "type"))
        })
        && !t.parses.is_empty()
}

/// Replace the root of every parse, keeping inflection intact.
fn reroot(parses: &[LinearParse], root: &str) -> Vec<LinearParse> {
    parses
        .iter()
        .map(|p| {
            let mut p = p.clone();
            for item in &mut p.items {
                if let LinearItem::Feature(n, v) = item {
                    if n == "root" {
                        *v = root.to_string();
                    }
                }
            }
            p
        })
        .collect()
}

fn try_date(tokens: &[RawToken], db: &CollocationDb) -> Option<(usize, RawToken)> {
    let is_day = |t: &RawToken| is_plain_number(t) && t.surface.parse::<u32>().map_or(false, |d| (1..=31).contains(&d));
    let is_month = |t: &RawToken| db.months.iter().any(|m| m == &t.surface);
    let is_year = |t: &RawToken| is_numeric(t);
    // longest shape first: day month year, then month year / day month
    for (len, ok) in [
        (3usize, tokens.len() >= 3 && is_day(&tokens[0]) && is_month(&tokens[1]) && is_year(&tokens[2])),
        (2, tokens.len() >= 2 && is_day(&tokens[0]) && is_month(&tokens[1])),
        (2, tokens.len() >= 2 && is_month(&tokens[0]) && is_year(&tokens[1])),
    ] {
        if !ok {
            continue;
        }
        let span = &tokens[..len];
        let last = &span[len - 1];
        let parses = if is_numeric(last) {
            // carry the year's inflection; the root swaps in the full span
            let last_root = parse_root(&last.parses[0]).unwrap_or(&last.surface).to_string();
            let mut full_root = span[..len - 1]
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            full_root.push(' ');
            full_root.push_str(&last_root);
            reroot(&date_parses(&last.parses), &full_root)
        } else {
            let mut lp = LinearParse::new();
            lp.items.push(LinearItem::Feature("cat".into(), "date".into()));
            lp.items.push(LinearItem::Feature("type".into(), "temp1".into()));
            lp.items.push(LinearItem::Feature("root".into(), joined_surface(span)));
            vec![lp]
        };
        return Some((len, packed(span, parses)));
    }
    None
}

/// Turn numeric parses into date parses: the category becomes `date`, the
/// numeric type becomes `temp1`, inflection is kept, derivation markers into
/// the nominal reading are dropped (the date itself is nominal).
fn date_parses(parses: &[LinearParse]) -> Vec<LinearParse> {
    let mut out = Vec::new();
    for p in parses {
        let mut lp = LinearParse::new();
        for item in &p.items {
            match item {
                LinearItem::Feature(n, v) => {
                    let v = match n.as_str() {
                        "cat" => "date".to_string(),
                        "type" => "temp1".to_string(),
                        _ => v.clone(),
                    };
                    lp.items.push(LinearItem::Feature(n.clone(), v));
                }
                LinearItem::Conv(c, x) => {
                    if !(c == "noun" && x == "none") {
                        lp.items.push(LinearItem::Conv(c.clone(), x.clone()));
                    }
                }
            }
        }
        out.push(lp);
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|p| seen.insert(p.clone()));
    out
}

fn try_percent(tokens: &[RawToken], db: &CollocationDb) -> Option<(usize, RawToken)> {
    let word = db.percent_word.as_ref()?;
    if tokens.len() < 2 || &tokens[0].surface != word || !is_numeric(&tokens[1]) {
        return None;
    }
    let number = &tokens[1];
    let num_root = parse_root(&number.parses[0]).unwrap_or(&number.surface);
    let root = format!("{} {}", word, num_root);
    let parses: Vec<LinearParse> = reroot(&number.parses, &root)
        .into_iter()
        .map(|mut p| {
            for item in &mut p.items {
                if let LinearItem::Feature(n, v) = item {
                    if n == "type" {
                        *v = "percentage".to_string();
                    }
                }
            }
            p
        })
        .collect();
    Some((2, packed(&tokens[..2], parses)))
}

fn try_range(tokens: &[RawToken]) -> Option<(usize, RawToken)> {
    if tokens.len() < 3
        || !is_plain_number(&tokens[0])
        || tokens[1].surface != "-"
        || !is_plain_number(&tokens[2])
    {
        return None;
    }
    let mut lp = LinearParse::new();
    lp.items.push(LinearItem::Feature("cat".into(), "adj".into()));
    lp.items.push(LinearItem::Feature("type".into(), "range".into()));
    lp.items.push(LinearItem::Feature("root".into(), format!("{}-{}", tokens[0].surface, tokens[2].surface)));
    Some((3, packed(&tokens[..3], vec![lp])))
}

fn candidates_at(tokens: &[RawToken], db: &CollocationDb) -> Option<(usize, RawToken)> {
    // (length, source priority, replacement); longest wins, lexicalized
    // entries win ties
    let mut best: Option<(usize, u8, RawToken)> = None;
    let mut offer = |len: usize, prio: u8, token: RawToken| {
        let better = match &best {
            None => true,
            Some((l, p, _)) => len > *l || (len == *l && prio < *p),
        };
        if better {
            best = Some((len, prio, token));
        }
    };
    for f in &db.fixed {
        let n = f.words.len();
        if tokens.len() >= n && tokens[..n].iter().zip(&f.words).all(|(t, w)| &t.surface == w) {
            offer(n, 0, packed(&tokens[..n], vec![instantiate(&f.output, &joined_surface(&tokens[..n]))]));
        }
    }
    for words in &db.inflectable {
        let n = words.len();
        if tokens.len() < n || !tokens[..n - 1].iter().zip(words).all(|(t, w)| &t.surface == w) {
            continue;
        }
        let last = &tokens[n - 1];
        let root_word = &words[n - 1];
        let kept: Vec<LinearParse> = last
            .parses
            .iter()
            .filter(|p| {
                parse_root(p).is_some_and(|r| r == root_word || r == format!("{root_word}'"))
            })
            .cloned()
            .collect();
        if kept.is_empty() {
            continue;
        }
        let prefix = words[..n - 1].join(" ");
        let rerooted: Vec<LinearParse> = kept
            .iter()
            .map(|p| {
                let root = format!("{} {}", prefix, parse_root(p).unwrap());
                reroot(std::slice::from_ref(p), &root).pop().unwrap()
            })
            .collect();
        offer(n, 1, packed(&tokens[..n], rerooted));
    }
    for entry in &db.patterns {
        if match_pattern(tokens, entry) {
            let n = entry.tokens.len();
            offer(n, 2, packed(&tokens[..n], vec![instantiate(&entry.output, &joined_surface(&tokens[..n]))]));
        }
    }
    if let Some((n, t)) = try_date(tokens, db) {
        offer(n, 3, t);
    }
    if let Some((n, t)) = try_percent(tokens, db) {
        offer(n, 3, t);
    }
    if let Some((n, t)) = try_range(tokens) {
        offer(n, 3, t);
    }
    best.map(|(len, _, token)| (len, token))
}

/// One left-to-right pass packing collocations; packed tokens are not
/// rescanned.
pub fn recognize_collocations(tokens: Vec<RawToken>, db: &CollocationDb) -> Vec<RawToken> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if let Some((len, token)) = candidates_at(&tokens[i..], db) {
            out.push(token);
            i += len;
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db() -> CollocationDb {
        CollocationDb::parse(
            "%% patterns\n\
             [ROOT=_R][CAT=VERB][SENSE=POS][TAM1=OPT][AGR=3SG] [ROOT=_R][CAT=VERB][SENSE=POS][TAM1=OPT][AGR=3SG]\n\
             [CAT=ADVERB][ROOT=%s][SENSE=POS]\n\
             %% fixed\n\
             yanI sIra :: [CAT=POSTP][ROOT=%s][SUBCAT=GEN]\n\
             %% inflectable\n\
             devam et\n\
             %% months\n\
             ocak Subat mart nisan mayIs haziran temmuz aGustos eylUl ekim kasIm aralIk\n\
             %% percent\n\
             yUzde\n",
        )
        .unwrap()
    }

    fn tok(surface: &str, parses: &[&str]) -> RawToken {
        RawToken::new(surface, parses.iter().map(|p| parse_linear(p).unwrap()).collect())
    }

    #[test]
    fn database_round_trips() {
        let d = db();
        let text = d.serialize();
        let again = CollocationDb::parse(&text).unwrap();
        assert_eq!(again.serialize(), text);
        assert_eq!(again.patterns, d.patterns);
        assert_eq!(again.fixed, d.fixed);
    }

    #[test]
    fn duplicated_optative_packs_with_shared_root() {
        let kosa = || {
            tok("koSa", &[
                "[CAT=VERB][ROOT=koS][SENSE=POS][TAM1=OPT][AGR=3SG]",
                "[CAT=NOUN][ROOT=koSa][AGR=3SG][POSS=NONE][CASE=NOM]",
            ])
        };
        let other = tok("gide", &["[CAT=VERB][ROOT=git][SENSE=POS][TAM1=OPT][AGR=3SG]"]);
        let got = recognize_collocations(vec![kosa(), kosa()], &db());
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].surface, "koSa koSa");
        assert!(got[0].collocation);
        assert_eq!(serialize_linear(&got[0].parses[0]), "[CAT=ADVERB][ROOT=koSa koSa][SENSE=POS]");
        // different roots must not pack
        let got = recognize_collocations(vec![kosa(), other], &db());
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn fixed_collocation_beats_its_parts() {
        let yani = tok("yanI", &["[CAT=NOUN][ROOT=yan][AGR=3SG][POSS=3SG][CASE=NOM]"]);
        let sira = tok("sIra", &["[CAT=NOUN][ROOT=sIra][AGR=3SG][POSS=NONE][CASE=NOM]"]);
        let got = recognize_collocations(vec![yani, sira], &db());
        assert_eq!(got.len(), 1);
        assert_eq!(serialize_linear(&got[0].parses[0]), "[CAT=POSTP][ROOT=yanI sIra][SUBCAT=GEN]");
    }

    #[test]
    fn inflectable_collocation_keeps_and_reroots_matching_parses() {
        let devam = tok("devam", &["[CAT=NOUN][ROOT=devam][AGR=3SG][POSS=NONE][CASE=NOM]"]);
        let ediyor = tok("ediyor", &[
            "[CAT=VERB][ROOT=et][SENSE=POS][TAM1=PR_CONT][AGR=3SG]",
            "[CAT=NOUN][ROOT=edi][AGR=3SG][POSS=NONE][CASE=NOM]",
        ]);
        let got = recognize_collocations(vec![devam, ediyor], &db());
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].parses.len(), 1);
        assert_eq!(
            serialize_linear(&got[0].parses[0]),
            "[CAT=VERB][ROOT=devam et][SENSE=POS][TAM1=PR_CONT][AGR=3SG]"
        );
    }

    #[test]
    fn dates_pack_and_keep_year_inflection() {
        let two = tok("2", &["[CAT=ADJ][TYPE=CARDINAL][ROOT=2]"]);
        let subat = RawToken { unknown: true, ..RawToken::new("Subat", vec![]) };
        let year = tok(
            "1915'te",
            &["[CAT=ADJ][TYPE=CARDINAL][ROOT=1915'][CONV=NOUN=NONE][AGR=3SG][POSS=NONE][CASE=LOC]"],
        );
        let got = recognize_collocations(vec![two, subat, year], &db());
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].surface, "2 Subat 1915'te");
        assert_eq!(
            serialize_linear(&got[0].parses[0]),
            "[CAT=DATE][TYPE=TEMP1][ROOT=2 Subat 1915'][AGR=3SG][POSS=NONE][CASE=LOC]"
        );
    }

    #[test]
    fn percent_and_range_shapes_pack() {
        let yuzde = tok("yUzde", &["[CAT=NOUN][ROOT=yUz][AGR=3SG][POSS=NONE][CASE=LOC]"]);
        let num = tok("10", &["[CAT=ADJ][TYPE=CARDINAL][ROOT=10]"]);
        let got = recognize_collocations(vec![yuzde, num], &db());
        assert_eq!(got.len(), 1);
        assert_eq!(serialize_linear(&got[0].parses[0]), "[CAT=ADJ][TYPE=PERCENTAGE][ROOT=yUzde 10]");

        let a = tok("1997", &["[CAT=ADJ][TYPE=CARDINAL][ROOT=1997]"]);
        let dash = tok("-", &["[CAT=PUNCT][ROOT=-]"]);
        let b = tok("1998", &["[CAT=ADJ][TYPE=CARDINAL][ROOT=1998]"]);
        let got = recognize_collocations(vec![a, dash, b], &db());
        assert_eq!(got.len(), 1);
        assert_eq!(serialize_linear(&got[0].parses[0]), "[CAT=ADJ][TYPE=RANGE][ROOT=1997-1998]");
    }
}
