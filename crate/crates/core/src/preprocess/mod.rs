//! Preprocessing: raw text → tokenized, collocation-packed, unknown-guessed,
//! hierarchical corpus.
//!
//! The stages operate on [`RawToken`]s whose parses are still in the flat
//! analyzer form (conversion markers visible); [`convert`] turns them into
//! nested feature structures, and [`project`] reduces them to the feature
//! subsets used by the learner.

pub mod colloc;
pub mod convert;
pub mod numeric;
pub mod project;
pub mod tokenize;
pub mod unknown;

use crate::model::*;
use std::collections::BTreeMap;
use thiserror::Error;

pub use colloc::{recognize_collocations, CollocationDb};
pub use convert::{linearize, to_hierarchical};
pub use numeric::analyze_numeric;
pub use project::{project, project_corpus, project_token, ProjectionTemplate};
pub use tokenize::tokenize;
pub use unknown::{guess_unknown, SuffixInventory};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("bad linear parse `{text}`: {msg}")]
    LinearParse { text: String, msg: String },
    #[error("bad lexicon line {line}: {msg}")]
    Lexicon { line: usize, msg: String },
    #[error("malformed conversion marker at pair {index}: {msg}")]
    Conversion { index: usize, msg: String },
    #[error("bad collocation database line {line}: {msg}")]
    CollocDb { line: usize, msg: String },
    #[error("bad suffix inventory line {line}: {msg}")]
    Inventory { line: usize, msg: String },
    #[error("bad projection template line {line}: {msg}")]
    Template { line: usize, msg: String },
    #[error("no projection template for category `{0}`")]
    MissingCategory(String),
    #[error("parse has no `cat` attribute")]
    MissingCat,
}

/// A token between tokenization and format conversion: surface plus flat
/// analyzer parses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawToken {
    pub surface: String,
    pub parses: Vec<LinearParse>,
    pub unknown: bool,
    pub collocation: bool,
}

impl RawToken {
    pub fn new(surface: impl Into<String>, parses: Vec<LinearParse>) -> Self {
        RawToken { surface: surface.into(), parses, unknown: false, collocation: false }
    }
}

/// Normalize an analyzer value into the corpus convention: `root` values are
/// verbatim; agreement-like values (`3SG`, `NONE`) are uppercase; everything
/// else is lowercase.
pub fn normalize_value(attr: &str, value: &str) -> String {
    if attr == "root" {
        return value.to_string();
    }
    let upper = value.to_ascii_uppercase();
    let agr_like = upper == "NONE"
        || (upper.len() == 3
            && upper.as_bytes()[0].is_ascii_digit()
            && (upper.ends_with("SG") || upper.ends_with("PL")));
    if agr_like { upper } else { value.to_ascii_lowercase() }
}

/// Parse the flat analyzer-parse notation `[cat=noun][root=ev]…` with
/// conversion markers `[conv=adj=rel]`. Attribute names are lowercased and
/// values normalized.
pub fn parse_linear(text: &str) -> Result<LinearParse, PreprocessError> {
    let err = |msg: &str| PreprocessError::LinearParse { text: text.to_string(), msg: msg.to_string() };
    let mut lp = LinearParse::new();
    let trimmed = text.trim();
    if !trimmed.starts_with('[') || !trimmed.ends_with(']') {
        return Err(err("expected bracketed items"));
    }
    for item in trimmed[1..trimmed.len() - 1].split("][") {
        let mut parts = item.splitn(2, '=');
        let name = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let rest = parts.next().ok_or_else(|| err("item without `=`"))?;
        if name.is_empty() {
            return Err(err("empty attribute name"));
        }
        if name == "conv" {
            let mut cs = rest.splitn(2, '=');
            let cat = cs.next().unwrap_or("").trim().to_ascii_lowercase();
            let suffix = cs
                .next()
                .map(|s| s.trim().to_ascii_lowercase())
                .unwrap_or_else(|| "none".to_string());
            if cat.is_empty() {
                return Err(err("conversion marker without category"));
            }
            lp.items.push(LinearItem::Conv(cat, suffix));
        } else {
            lp.items.push(LinearItem::Feature(name.clone(), normalize_value(&name, rest.trim())));
        }
    }
    if lp.items.is_empty() {
        return Err(err("empty parse"));
    }
    Ok(lp)
}

/// Render a linear parse in the analyzer notation (uppercase except roots).
pub fn serialize_linear(lp: &LinearParse) -> String {
    let mut s = String::new();
    for item in &lp.items {
        match item {
            LinearItem::Feature(n, v) => {
                let shown = if n == "root" { v.clone() } else { v.to_ascii_uppercase() };
                s.push_str(&format!("[{}={}]", n.to_ascii_uppercase(), shown));
            }
            LinearItem::Conv(c, x) => {
                s.push_str(&format!("[CONV={}={}]", c.to_ascii_uppercase(), x.to_ascii_uppercase()));
            }
        }
    }
    s
}

/// A toy analyzer: a surface → parses lookup backing tests and small runs.
/// File format: one entry per line, `surface<TAB>parse( | parse)*`.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    pub entries: BTreeMap<String, Vec<LinearParse>>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Lexicon, PreprocessError> {
        let mut lex = Lexicon::default();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, rest) = line.split_once('\t').ok_or(PreprocessError::Lexicon {
                line: ln + 1,
                msg: "expected `surface<TAB>parses`".into(),
            })?;
            let mut parses = Vec::new();
            for part in rest.split(" | ") {
                parses.push(parse_linear(part).map_err(|e| PreprocessError::Lexicon {
                    line: ln + 1,
                    msg: e.to_string(),
                })?);
            }
            lex.entries.insert(surface.trim().to_string(), parses);
        }
        Ok(lex)
    }

    pub fn lookup(&self, surface: &str) -> Option<&[LinearParse]> {
        self.entries.get(surface).map(|v| v.as_slice())
    }
}

/// Counters reported after preprocessing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub tokens: usize,
    pub parses: usize,
    /// Tokens with 0, 1, 2, 3, 4, >4 parses.
    pub distribution: [usize; 6],
    pub analyzer_calls: usize,
}

impl CorpusStats {
    pub fn ambiguity(&self) -> f64 {
        if self.tokens == 0 { 0.0 } else { self.parses as f64 / self.tokens as f64 }
    }

    pub fn render(&self) -> String {
        let pct = |n: usize| {
            if self.tokens == 0 { "-".to_string() } else { format!("{:.2}%", 100.0 * n as f64 / self.tokens as f64) }
        };
        let mut out = String::new();
        out.push_str(&format!("tokens: {}\n", self.tokens));
        out.push_str(&format!("parses: {}\n", self.parses));
        out.push_str(&format!("analyzer_calls: {}\n", self.analyzer_calls));
        out.push_str(&format!("ambiguity: {:.6}\n", self.ambiguity()));
        let labels = ["0", "1", "2", "3", "4", ">4"];
        for (lab, n) in labels.iter().zip(&self.distribution) {
            out.push_str(&format!("parses_{}: {} ({})\n", lab, n, pct(*n)));
        }
        out
    }
}

/// Parse-count distribution and totals of a finished corpus.
pub fn corpus_stats(c: &Corpus) -> CorpusStats {
    let mut s = CorpusStats::default();
    for sent in &c.sentences {
        for t in sent.body() {
            s.tokens += 1;
            s.parses += t.parses.len();
            let bucket = t.parses.len().min(5);
            s.distribution[bucket] += 1;
        }
    }
    s
}

/// End-to-end preprocessing of raw text: tokenize, analyze (lexicon +
/// numerics), pack collocations, guess unknowns, convert to hierarchical
/// structures, split at sentence-final punctuation.
pub fn preprocess_text(
    raw: &str,
    lex: &Lexicon,
    db: &CollocationDb,
    inv: &SuffixInventory,
) -> Result<(Corpus, CorpusStats), PreprocessError> {
    let mut stream: Vec<RawToken> = Vec::new();
    let mut analyzer_calls = 0usize;
    for surface in tokenize(raw) {
        let token = if let Some((parses, failed_tail)) = analyze_numeric(&surface, inv) {
            RawToken { unknown: failed_tail, ..RawToken::new(surface, parses) }
        } else {
            analyzer_calls += 1;
            match lex.lookup(&surface) {
                Some(parses) => RawToken::new(surface, parses.to_vec()),
                None => RawToken { unknown: true, ..RawToken::new(surface, Vec::new()) },
            }
        };
        stream.push(token);
    }
    let mut stream = recognize_collocations(stream, db);
    for token in &mut stream {
        if token.unknown && token.parses.is_empty() {
            token.parses = guess_unknown(&token.surface, inv);
        }
    }
    // convert and split into sentences at final punctuation
    let mut sentences = Vec::new();
    let mut body: Vec<AmbiguousToken> = Vec::new();
    for raw_token in stream {
        let mut parses = Vec::new();
        for lp in &raw_token.parses {
            parses.push(to_hierarchical(lp)?);
        }
        let is_sentence_end = parses.len() == 1
            && parses[0].cat() == Some("punct")
            && matches!(parses[0].atom("root"), Some(".") | Some("?") | Some("!") | Some("..."));
        let mut token = AmbiguousToken::new(raw_token.surface, parses);
        token.unknown = raw_token.unknown;
        token.collocation = raw_token.collocation;
        token.dedup_parses();
        body.push(token);
        if is_sentence_end {
            sentences.push(Sentence::from_body(std::mem::take(&mut body)));
        }
    }
    if !body.is_empty() {
        sentences.push(Sentence::from_body(body));
    }
    let corpus = Corpus::new(sentences);
    let mut stats = corpus_stats(&corpus);
    stats.analyzer_calls = analyzer_calls;
    Ok((corpus, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_notation_round_trips() {
        let text = "[CAT=VERB][ROOT=gel][SENSE=POS][CONV=NOUN=YIS][AGR=3SG][POSS=2SG][CASE=LOC]";
        let lp = parse_linear(text).unwrap();
        assert_eq!(lp.items[0], LinearItem::Feature("cat".into(), "verb".into()));
        assert_eq!(lp.items[3], LinearItem::Conv("noun".into(), "yis".into()));
        assert_eq!(lp.items[4], LinearItem::Feature("agr".into(), "3SG".into()));
        assert_eq!(serialize_linear(&lp), text);
    }

    #[test]
    fn roots_keep_their_case() {
        let lp = parse_linear("[CAT=NOUN][ROOT=kazI]").unwrap();
        assert_eq!(lp.items[1], LinearItem::Feature("root".into(), "kazI".into()));
    }

    #[test]
    fn stats_count_distribution_buckets() {
        let mk = |n: usize| {
            let mut parses = Vec::new();
            for i in 0..n {
                let mut p = FeatureStructure::new();
                p.set_atom("cat", "noun");
                p.set_atom("root", format!("r{i}"));
                parses.push(p);
            }
            AmbiguousToken::new("x", parses)
        };
        let corpus = Corpus::new(vec![Sentence::from_body(vec![mk(1), mk(2), mk(5)])]);
        let s = corpus_stats(&corpus);
        assert_eq!(s.tokens, 3);
        assert_eq!(s.parses, 8);
        assert_eq!(s.distribution, [0, 1, 1, 0, 0, 1]);
        assert!((s.ambiguity() - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(corpus_stats(&Corpus::default()), CorpusStats::default());
    }
}
