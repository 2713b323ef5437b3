//! Analysis of numeric tokens: classification (cardinal, ordinal, real,
//! percentage, time, ratio) and parsing of attached inflectional suffixes.

use super::unknown::{parse_tail, Strictness, SuffixInventory, TailAnalysis};
use crate::model::{LinearItem, LinearParse};

fn classify(body: &str) -> &'static str {
    if body.contains(':') {
        let parts: Vec<&str> = body.split(':').collect();
        let clock = parts.len() == 2
            && parts.iter().all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit()))
            && parts[0].len() <= 2
            && parts[0].parse::<u32>().unwrap_or(99) < 24
            && parts[1].len() == 2
            && parts[1].parse::<u32>().unwrap_or(99) < 60;
        return if clock { "time" } else { "ratio" };
    }
    if body.contains('/') {
        return "ratio";
    }
    if body.ends_with('.') {
        return "ordinal";
    }
    if body.contains(',') {
        let groups: Vec<&str> = body.split(',').collect();
        let grouping = groups.len() > 1 && groups[1..].iter().all(|g| g.len() == 3) && !body.contains('.');
        return if grouping { "cardinal" } else { "real" };
    }
    if body.contains('.') {
        let groups: Vec<&str> = body.split('.').collect();
        let grouping = groups[1..].iter().all(|g| g.len() == 3);
        return if grouping { "cardinal" } else { "real" };
    }
    "cardinal"
}

fn numeric_parse(cat: &str, kind: &str, root: &str, tail: Option<&TailAnalysis>) -> Vec<LinearParse> {
    let mut lp = LinearParse::new();
    lp.items.push(LinearItem::Feature("cat".into(), cat.into()));
    lp.items.push(LinearItem::Feature("type".into(), kind.into()));
    lp.items.push(LinearItem::Feature("root".into(), root.into()));
    let Some(ta) = tail else { return vec![lp] };
    lp.items.push(LinearItem::Conv("noun".into(), "none".into()));
    lp.items.push(LinearItem::Feature("agr".into(), ta.agr.clone()));
    lp.items.push(LinearItem::Feature("poss".into(), ta.poss.clone()));
    lp.items.push(LinearItem::Feature("case".into(), ta.case.clone()));
    if !ta.rel {
        return vec![lp];
    }
    let mut adj = lp.clone();
    adj.items.push(LinearItem::Conv("adj".into(), "rel".into()));
    let mut noun = adj.clone();
    noun.items.push(LinearItem::Conv("noun".into(), "none".into()));
    noun.items.push(LinearItem::Feature("agr".into(), "3SG".into()));
    noun.items.push(LinearItem::Feature("poss".into(), "NONE".into()));
    noun.items.push(LinearItem::Feature("case".into(), "nom".into()));
    vec![adj, noun]
}

/// Analyze a token that starts with a digit (or `%` and a digit). Returns
/// `None` for non-numeric tokens; otherwise the parses plus a flag that the
/// suffix tail could not be read (the token should be marked unknown).
///
/// The numeral (with any apostrophe, without any `%`) is the root; suffixes
/// attach leniently, since their phonology follows the pronunciation of the
/// numeral rather than its written form. Bare ordinals also get a nominal
/// reading; ratio tails with a possessive read as `number`, others as `adj`.
pub fn analyze_numeric(surface: &str, inv: &SuffixInventory) -> Option<(Vec<LinearParse>, bool)> {
    let percent = surface.starts_with('%');
    let rest = if percent { &surface[1..] } else { surface };
    if !rest.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    let (num, tail) = match rest.find('\'') {
        Some(p) => (&rest[..p + 1], &rest[p + 1..]),
        None => {
            let split = rest.find(|c: char| c.is_alphabetic()).unwrap_or(rest.len());
            (&rest[..split], &rest[split..])
        }
    };
    let body = num.trim_end_matches('\'');
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | ':' | '/')) {
        return None;
    }
    let kind = if percent { "percentage" } else { classify(body) };
    if tail.is_empty() {
        let mut parses = numeric_parse("adj", kind, num, None);
        if kind == "ordinal" {
            parses.extend(numeric_parse("adj", kind, num, Some(&TailAnalysis::default())));
        }
        return Some((parses, false));
    }
    let mut parses = Vec::new();
    for ta in parse_tail(num, tail, inv, Strictness::Lenient) {
        let cat = if kind == "ratio" && ta.poss != "NONE" { "number" } else { "adj" };
        parses.extend(numeric_parse(cat, kind, num, Some(&ta)));
    }
    let mut seen = std::collections::BTreeSet::new();
    parses.retain(|p| seen.insert(p.clone()));
    if parses.is_empty() {
        return Some((numeric_parse("adj", kind, num, None), true));
    }
    Some((parses, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::serialize_linear;

    fn go(surface: &str) -> (Vec<String>, bool) {
        let (parses, unk) = analyze_numeric(surface, &SuffixInventory::standard()).unwrap();
        (parses.iter().map(serialize_linear).collect(), unk)
    }

    #[test]
    fn classifies_number_shapes() {
        assert_eq!(classify("42"), "cardinal");
        assert_eq!(classify("32.542.432"), "cardinal");
        assert_eq!(classify("1.7"), "real");
        assert_eq!(classify("0,23"), "real");
        assert_eq!(classify("3783."), "ordinal");
        assert_eq!(classify("23:15"), "time");
        assert_eq!(classify("3:5"), "ratio");
        assert_eq!(classify("3/4"), "ratio");
        assert!(analyze_numeric("evde", &SuffixInventory::standard()).is_none());
    }

    #[test]
    fn grouped_cardinal_with_genitive_gets_both_possessive_readings() {
        let (got, unk) = go("32.542.432'nin");
        assert!(!unk);
        assert_eq!(
            got,
            vec![
                "[CAT=ADJ][TYPE=CARDINAL][ROOT=32.542.432'][CONV=NOUN=NONE][AGR=3SG][POSS=2SG][CASE=GEN]",
                "[CAT=ADJ][TYPE=CARDINAL][ROOT=32.542.432'][CONV=NOUN=NONE][AGR=3SG][POSS=NONE][CASE=GEN]",
            ]
        );
    }

    #[test]
    fn percentage_and_time_and_real() {
        assert_eq!(
            go("%7'sinin").0,
            vec!["[CAT=ADJ][TYPE=PERCENTAGE][ROOT=7'][CONV=NOUN=NONE][AGR=3SG][POSS=3SG][CASE=GEN]"]
        );
        assert_eq!(
            go("23:15'te").0,
            vec!["[CAT=ADJ][TYPE=TIME][ROOT=23:15'][CONV=NOUN=NONE][AGR=3SG][POSS=NONE][CASE=LOC]"]
        );
        assert_eq!(
            go("0,23'ten").0,
            vec!["[CAT=ADJ][TYPE=REAL][ROOT=0,23'][CONV=NOUN=NONE][AGR=3SG][POSS=NONE][CASE=ABL]"]
        );
    }

    #[test]
    fn bare_ordinal_is_adjective_or_noun() {
        assert_eq!(
            go("4.").0,
            vec![
                "[CAT=ADJ][TYPE=ORDINAL][ROOT=4.]",
                "[CAT=ADJ][TYPE=ORDINAL][ROOT=4.][CONV=NOUN=NONE][AGR=3SG][POSS=NONE][CASE=NOM]",
            ]
        );
        assert_eq!(
            go("32.si").0,
            vec!["[CAT=ADJ][TYPE=ORDINAL][ROOT=32.][CONV=NOUN=NONE][AGR=3SG][POSS=3SG][CASE=NOM]"]
        );
    }

    #[test]
    fn suffixed_ratio_splits_adjective_and_number_readings() {
        let got = go("3:5'i").0;
        assert!(got.contains(
            &"[CAT=ADJ][TYPE=RATIO][ROOT=3:5'][CONV=NOUN=NONE][AGR=3SG][POSS=NONE][CASE=ACC]".to_string()
        ));
        assert!(got.contains(
            &"[CAT=NUMBER][TYPE=RATIO][ROOT=3:5'][CONV=NOUN=NONE][AGR=3SG][POSS=3SG][CASE=NOM]".to_string()
        ));
    }

    #[test]
    fn unreadable_tail_marks_unknown() {
        let (got, unk) = go("1996'xyz");
        assert!(unk);
        assert_eq!(got, vec!["[CAT=ADJ][TYPE=CARDINAL][ROOT=1996']"]);
    }
}
