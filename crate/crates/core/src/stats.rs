//! Statistical pruning: contextual-statistics passes and root-frequency
//! preference pruning.
//!
//! Both prune parses only when their evidence falls *strictly* below a
//! fraction of the best sibling's, and never empty a parse list.

use crate::learner::{build_tables, IgnoreFeatures, LearnerConfig, ContextKey, ScoreTables, Shape};
use crate::model::*;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("malformed root-stats line {line}: {msg}")]
    RootTable { line: usize, msg: String },
}

/// Parameters of the contextual-statistics stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextStatsConfig {
    /// Weights of the two-sided, left-only and right-only context scores.
    pub weights: (f64, f64, f64),
    /// Per-pass discard fractions (a parse dies when its score is strictly
    /// below fraction × the best sibling score).
    pub fractions: [f64; 3],
    pub ignore: IgnoreFeatures,
}

impl Default for ContextStatsConfig {
    fn default() -> Self {
        ContextStatsConfig {
            weights: (0.5, 0.25, 0.25),
            fractions: [0.05, 0.10, 0.20],
            ignore: IgnoreFeatures::default(),
        }
    }
}

fn learner_cfg(ignore: &IgnoreFeatures) -> LearnerConfig {
    LearnerConfig { ignore: ignore.clone(), ..LearnerConfig::default() }
}

fn slot_key(parse: &FeatureStructure, offset: isize, ignore: &IgnoreFeatures) -> FeatureStructure {
    let drops = if offset < 0 { &ignore.left } else { &ignore.right };
    let mut key = parse.clone();
    for name in drops {
        key.remove(name);
    }
    key
}

fn s_value(t: &ScoreTables, key: ContextKey, p: &FeatureStructure) -> f64 {
    let count = t.count_of(p);
    if count == 0 { 0.0 } else { t.incontext_of(&key, p) as f64 / count as f64 }
}

/// One on-the-fly sweep of contextual pruning over `corpus` with fixed
/// tables. `project` maps stored parses to the table key space (pass the
/// identity when the corpus is already projected). Returns the number of
/// parses removed.
pub fn context_stats_pass<F>(
    corpus: &mut Corpus,
    tables: &ScoreTables,
    cfg: &ContextStatsConfig,
    pass: usize,
    project: &F,
) -> usize
where
    F: Fn(&FeatureStructure) -> FeatureStructure,
{
    let g = cfg.fractions[pass.min(2)];
    let (w_both, w_left, w_right) = cfg.weights;
    let mut removed = 0;
    for sent in &mut corpus.sentences {
        for i in 1..sent.tokens.len().saturating_sub(1) {
            let token = &sent.tokens[i];
            if token.is_marker() || token.parses.len() < 2 {
                continue;
            }
            // distinct projected parses of this token
            let mut proj: Vec<FeatureStructure> = Vec::new();
            for p in &token.parses {
                let q = project(p);
                if !proj.contains(&q) {
                    proj.push(q);
                }
            }
            if proj.len() < 2 {
                continue;
            }
            let neighbor_key = |t: &AmbiguousToken, offset: isize| -> Option<FeatureStructure> {
                let mut qs: Vec<FeatureStructure> = Vec::new();
                for p in &t.parses {
                    let q = project(p);
                    if !qs.contains(&q) {
                        qs.push(q);
                    }
                }
                (qs.len() == 1).then(|| slot_key(&qs[0], offset, &cfg.ignore))
            };
            let left = neighbor_key(&sent.tokens[i - 1], -1);
            let right = neighbor_key(&sent.tokens[i + 1], 1);
            let scores: Vec<f64> = proj
                .iter()
                .map(|q| match (&left, &right) {
                    (Some(l), Some(r)) => {
                        let both = s_value(
                            tables,
                            ContextKey { shape: Shape::S3, slots: vec![l.clone(), r.clone()] },
                            q,
                        );
                        let sl = s_value(tables, ContextKey { shape: Shape::S4L, slots: vec![l.clone()] }, q);
                        let sr = s_value(tables, ContextKey { shape: Shape::S4R, slots: vec![r.clone()] }, q);
                        w_both * both + w_left * sl + w_right * sr
                    }
                    (Some(l), None) => s_value(tables, ContextKey { shape: Shape::S4L, slots: vec![l.clone()] }, q),
                    (None, Some(r)) => s_value(tables, ContextKey { shape: Shape::S4R, slots: vec![r.clone()] }, q),
                    (None, None) => f64::NAN,
                })
                .collect();
            if scores.iter().any(|s| s.is_nan()) {
                continue; // no unambiguous neighbor at all
            }
            let max = scores.iter().cloned().fold(0.0f64, f64::max);
            if max <= 0.0 {
                continue;
            }
            let keep: BTreeSet<usize> = proj
                .iter()
                .enumerate()
                .filter(|(j, _)| scores[*j] >= g * max)
                .map(|(j, _)| j)
                .collect();
            if keep.is_empty() {
                continue;
            }
            let token = &mut sent.tokens[i];
            let before = token.parses.len();
            token.parses.retain(|p| {
                let q = project(p);
                keep.contains(&proj.iter().position(|x| *x == q).unwrap())
            });
            removed += before - token.parses.len();
        }
    }
    removed
}

/// Full contextual-statistics stage: three passes with per-pass fractions,
/// each iterated (rebuilding the tables from the current corpus between
/// sweeps) until it causes no further removals — so re-running the stage on
/// its own output changes nothing. Returns total parses removed.
pub fn context_stats_stage<F>(corpus: &mut Corpus, cfg: &ContextStatsConfig, project: &F) -> usize
where
    F: Fn(&FeatureStructure) -> FeatureStructure,
{
    let lcfg = learner_cfg(&cfg.ignore);
    let mut total = 0;
    for pass in 0..3 {
        loop {
            let mut shadow = corpus.clone();
            for sent in &mut shadow.sentences {
                for token in &mut sent.tokens {
                    let mut qs: Vec<FeatureStructure> = Vec::new();
                    for p in &token.parses {
                        let q = project(p);
                        if !qs.contains(&q) {
                            qs.push(q);
                        }
                    }
                    token.parses = qs;
                }
            }
            let tables = build_tables(&shadow, &lcfg);
            let removed = context_stats_pass(corpus, &tables, cfg, pass, project);
            total += removed;
            if removed == 0 {
                break;
            }
        }
    }
    total
}

/// Frequencies of (root, top-level category) pairs among unambiguous tokens.
/// For derived forms the innermost stem root is counted and the entry is
/// flagged as derived.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RootStatsTable {
    pub counts: BTreeMap<(String, String), u64>,
    pub derived: BTreeSet<(String, String)>,
}

impl RootStatsTable {
    pub fn freq(&self, root: &str, cat: &str) -> u64 {
        self.counts.get(&(root.to_string(), cat.to_string())).copied().unwrap_or(0)
    }
}

fn root_key(p: &FeatureStructure) -> Option<(String, String)> {
    Some((p.innermost_root()?.to_string(), p.cat()?.to_string()))
}

/// Count root/category frequencies over the unambiguous tokens of `corpus`.
pub fn build_root_stats(corpus: &Corpus) -> RootStatsTable {
    let mut t = RootStatsTable::default();
    for sent in &corpus.sentences {
        for token in sent.body() {
            if token.parses.len() != 1 {
                continue;
            }
            let p = &token.parses[0];
            let Some(key) = root_key(p) else { continue };
            *t.counts.entry(key.clone()).or_insert(0) += 1;
            if p.is_derived() {
                t.derived.insert(key);
            }
        }
    }
    t
}

/// Drop parses of root-ambiguous tokens whose root frequency is strictly
/// below `ratio` × the best root frequency among the token's parses.
/// Rootless parses are exempt; deletion never empties a parse list.
/// Returns the number of parses removed.
pub fn root_stats_prune(corpus: &mut Corpus, table: &RootStatsTable, ratio: f64) -> usize {
    assert!(ratio > 0.0 && ratio < 1.0, "root-stats ratio must be in (0,1)");
    let mut removed = 0;
    for sent in &mut corpus.sentences {
        for token in &mut sent.tokens {
            if token.is_marker() || token.parses.len() < 2 {
                continue;
            }
            let keys: Vec<Option<(String, String)>> = token.parses.iter().map(root_key).collect();
            let roots: BTreeSet<&str> =
                keys.iter().flatten().map(|(r, _)| r.as_str()).collect();
            if roots.len() < 2 {
                continue; // all parses share one root: nothing to prefer
            }
            let freqs: Vec<Option<u64>> = keys
                .iter()
                .map(|k| k.as_ref().map(|(r, c)| table.freq(r, c)))
                .collect();
            let max = freqs.iter().flatten().copied().max().unwrap_or(0);
            if max == 0 {
                continue;
            }
            let keep: Vec<bool> = freqs
                .iter()
                .map(|f| match f {
                    Some(f) => (*f as f64) >= ratio * max as f64,
                    None => true,
                })
                .collect();
            if keep.iter().all(|k| !k) {
                continue; // empty-guard
            }
            let before = token.parses.len();
            let mut it = keep.iter();
            token.parses.retain(|_| *it.next().unwrap());
            removed += before - token.parses.len();
        }
    }
    removed
}

/// Serialize a root-stats table: `root<TAB>cat<TAB>count<TAB>d|l` per line.
pub fn serialize_root_stats(t: &RootStatsTable) -> String {
    let mut out = String::new();
    for ((root, cat), count) in &t.counts {
        let flag = if t.derived.contains(&(root.clone(), cat.clone())) { 'd' } else { 'l' };
        out.push_str(&format!("{root}\t{cat}\t{count}\t{flag}\n"));
    }
    out
}

/// Parse the table format written by [`serialize_root_stats`].
pub fn parse_root_stats(text: &str) -> Result<RootStatsTable, StatsError> {
    let mut t = RootStatsTable::default();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 4 {
            return Err(StatsError::RootTable { line: ln + 1, msg: "expected 4 tab-separated fields".into() });
        }
        let count: u64 = parts[2]
            .parse()
            .map_err(|_| StatsError::RootTable { line: ln + 1, msg: "bad count".into() })?;
        let key = (parts[0].to_string(), parts[1].to_string());
        match parts[3] {
            "d" => {
                t.derived.insert(key.clone());
            }
            "l" => {}
            other => {
                return Err(StatsError::RootTable { line: ln + 1, msg: format!("bad flag `{other}`") })
            }
        }
        t.counts.insert(key, count);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(pairs: &[(&str, &str)]) -> FeatureStructure {
        let mut p = FeatureStructure::new();
        for (n, v) in pairs {
            p.set_atom(*n, *v);
        }
        p
    }

    fn tok(surface: &str, parses: Vec<FeatureStructure>) -> AmbiguousToken {
        AmbiguousToken::new(surface, parses)
    }

    fn id(p: &FeatureStructure) -> FeatureStructure {
        p.clone()
    }

    #[test]
    fn weighted_sum_matches_hand_computation() {
        // evidence: after det, noun 3 of 4; verb 1 of 2 but never after det
        let det = fs(&[("cat", "det")]);
        let noun = fs(&[("cat", "noun")]);
        let verb = fs(&[("cat", "verb")]);
        let punct = fs(&[("cat", "punct"), ("root", ".")]);
        let mut sentences = Vec::new();
        for _ in 0..3 {
            sentences.push(Sentence::from_body(vec![
                tok("d", vec![det.clone()]),
                tok("n", vec![noun.clone()]),
                tok(".", vec![punct.clone()]),
            ]));
        }
        sentences.push(Sentence::from_body(vec![tok("n", vec![noun.clone()])]));
        for _ in 0..2 {
            sentences.push(Sentence::from_body(vec![tok("v", vec![verb.clone()])]));
        }
        let ambiguous = Sentence::from_body(vec![
            tok("d", vec![det.clone()]),
            tok("x", vec![noun.clone(), verb.clone()]),
            tok(".", vec![punct.clone()]),
        ]);
        sentences.push(ambiguous);
        let mut corpus = Corpus::new(sentences);
        let cfg = ContextStatsConfig { ignore: IgnoreFeatures { left: vec![], right: vec![] }, ..Default::default() };
        let tables = build_tables(&corpus, &learner_cfg(&cfg.ignore));
        // noun: s(det—punct)=3/4, s(det—)=3/4, s(—punct)=3/4 → 0.75
        // verb: all s = 0 → 0; 0 < 0.05·0.75 → removed
        let removed = context_stats_pass(&mut corpus, &tables, &cfg, 0, &id);
        assert_eq!(removed, 1);
        let token = &corpus.sentences.last().unwrap().tokens[2];
        assert_eq!(token.parses, vec![noun]);
    }

    #[test]
    fn all_zero_scores_leave_token_unchanged() {
        let noun = fs(&[("cat", "noun")]);
        let verb = fs(&[("cat", "verb")]);
        let mut corpus = Corpus::new(vec![Sentence::from_body(vec![tok("x", vec![noun, verb])])]);
        let cfg = ContextStatsConfig::default();
        let tables = ScoreTables::default();
        assert_eq!(context_stats_pass(&mut corpus, &tables, &cfg, 0, &id), 0);
        assert_eq!(corpus.sentences[0].body()[0].parses.len(), 2);
    }

    #[test]
    fn stage_reaches_a_fixed_point() {
        let det = fs(&[("cat", "det")]);
        let noun = fs(&[("cat", "noun")]);
        let verb = fs(&[("cat", "verb")]);
        let mut sentences = Vec::new();
        for _ in 0..5 {
            sentences.push(Sentence::from_body(vec![tok("d", vec![det.clone()]), tok("n", vec![noun.clone()])]));
        }
        sentences.push(Sentence::from_body(vec![
            tok("v", vec![verb.clone()]),
            tok("n", vec![noun.clone()]),
        ]));
        sentences.push(Sentence::from_body(vec![
            tok("d", vec![det.clone()]),
            tok("x", vec![noun.clone(), verb.clone()]),
        ]));
        let mut corpus = Corpus::new(sentences);
        let cfg = ContextStatsConfig { ignore: IgnoreFeatures { left: vec![], right: vec![] }, ..Default::default() };
        let removed = context_stats_stage(&mut corpus, &cfg, &id);
        assert!(removed > 0);
        assert_eq!(context_stats_stage(&mut corpus, &cfg, &id), 0);
    }

    #[test]
    fn root_stats_count_innermost_roots() {
        let goz = fs(&[("cat", "noun"), ("root", "gOz"), ("case", "dat")]);
        let mut derived = fs(&[("cat", "adj")]);
        derived.set("stem", FeatureValue::Nested(Box::new(fs(&[("cat", "noun"), ("root", "kum")]))));
        let corpus = Corpus::new(vec![Sentence::from_body(vec![
            tok("gOze", vec![goz]),
            tok("kumlu", vec![derived]),
        ])]);
        let t = build_root_stats(&corpus);
        assert_eq!(t.freq("gOz", "noun"), 1);
        assert_eq!(t.freq("kum", "adj"), 1);
        assert!(t.derived.contains(&("kum".into(), "adj".into())));
        assert!(build_root_stats(&Corpus::default()).counts.is_empty());
    }

    #[test]
    fn frequent_root_wins_pruning() {
        let mut table = RootStatsTable::default();
        table.counts.insert(("gOz".into(), "noun".into()), 40);
        table.counts.insert(("gOze".into(), "noun".into()), 1);
        let goze = fs(&[("cat", "noun"), ("root", "gOze"), ("case", "nom")]);
        let goz_dat = fs(&[("cat", "noun"), ("root", "gOz"), ("case", "dat")]);
        let mut corpus =
            Corpus::new(vec![Sentence::from_body(vec![tok("gOze", vec![goze, goz_dat.clone()])])]);
        assert_eq!(root_stats_prune(&mut corpus, &table, 0.1), 1);
        assert_eq!(corpus.sentences[0].body()[0].parses, vec![goz_dat]);
        // idempotent
        assert_eq!(root_stats_prune(&mut corpus, &table, 0.1), 0);
    }

    #[test]
    fn unseen_roots_and_ties_are_preserved() {
        let table = RootStatsTable::default();
        let a = fs(&[("cat", "noun"), ("root", "alan")]);
        let b = fs(&[("cat", "noun"), ("root", "ala")]);
        let mut corpus = Corpus::new(vec![Sentence::from_body(vec![tok("alan", vec![a, b])])]);
        assert_eq!(root_stats_prune(&mut corpus, &table, 0.1), 0);
        assert_eq!(corpus.sentences[0].body()[0].parses.len(), 2);
    }

    #[test]
    fn root_table_round_trips() {
        let mut t = RootStatsTable::default();
        t.counts.insert(("ama".into(), "conn".into()), 270);
        t.counts.insert(("kum".into(), "adj".into()), 3);
        t.derived.insert(("kum".into(), "adj".into()));
        let text = serialize_root_stats(&t);
        assert_eq!(parse_root_stats(&text).unwrap(), t);
    }
}
