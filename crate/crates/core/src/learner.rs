//! Unsupervised induction of choose and delete rules.
//!
//! From every unambiguous token of a projected corpus two tables are built:
//! `count(P)` — how often parse P occurs unambiguously anywhere — and
//! `incontext(C, P)` — how often it occurs inside the unambiguous context C.
//! Ambiguous tokens in unambiguous contexts then yield candidate rules that
//! are scored against those tables, greedily selected above per-specificity
//! thresholds, applied, and the tables updated incrementally.

use crate::model::*;
use crate::rules::{apply_at, ConstraintRule, Mode, Provenance, RuleKind};
use std::collections::{BTreeMap, BTreeSet};

/// Context shape, from most specific (both neighbors on both sides) down to
/// a single immediate neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    S1,
    S2L,
    S2R,
    S3,
    S4L,
    S4R,
}

pub const ALL_SHAPES: [Shape; 6] = [Shape::S1, Shape::S2L, Shape::S2R, Shape::S3, Shape::S4L, Shape::S4R];
/// Shapes used when learning delete rules (everything but the full context).
pub const DELETE_SHAPES: [Shape; 5] = [Shape::S2L, Shape::S2R, Shape::S3, Shape::S4L, Shape::S4R];

impl Shape {
    /// Neighbor offsets (relative to the focus token) this shape constrains.
    pub fn offsets(self) -> &'static [isize] {
        match self {
            Shape::S1 => &[-2, -1, 1, 2],
            Shape::S2L => &[-2, -1],
            Shape::S2R => &[1, 2],
            Shape::S3 => &[-1, 1],
            Shape::S4L => &[-1],
            Shape::S4R => &[1],
        }
    }

    /// Specificity group index: 0 = S1, 1 = {S2L,S2R}, 2 = S3, 3 = {S4L,S4R}.
    pub fn group(self) -> usize {
        match self {
            Shape::S1 => 0,
            Shape::S2L | Shape::S2R => 1,
            Shape::S3 => 2,
            Shape::S4L | Shape::S4R => 3,
        }
    }
}

/// A keyed unambiguous context: the shape plus the (projected, feature
/// filtered) parses of its slots, in offset order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextKey {
    pub shape: Shape,
    pub slots: Vec<FeatureStructure>,
}

impl ContextKey {
    /// Total constraint size, used as a deterministic tie-breaker.
    pub fn attr_count(&self) -> usize {
        self.slots.iter().map(|s| s.attr_count_recursive()).sum()
    }
}

/// The `incontext` and `count` occurrence tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoreTables {
    pub incontext: BTreeMap<(ContextKey, FeatureStructure), u64>,
    pub count: BTreeMap<FeatureStructure, u64>,
}

impl ScoreTables {
    pub fn count_of(&self, p: &FeatureStructure) -> u64 {
        self.count.get(p).copied().unwrap_or(0)
    }

    pub fn incontext_of(&self, c: &ContextKey, p: &FeatureStructure) -> u64 {
        self.incontext.get(&(c.clone(), p.clone())).copied().unwrap_or(0)
    }

    fn add(&mut self, other: &ScoreTables) {
        for (k, v) in &other.incontext {
            *self.incontext.entry(k.clone()).or_insert(0) += v;
        }
        for (k, v) in &other.count {
            *self.count.entry(k.clone()).or_insert(0) += v;
        }
    }

    fn subtract(&mut self, other: &ScoreTables) {
        for (k, v) in &other.incontext {
            let e = self.incontext.get_mut(k).expect("subtracting unseen incontext entry");
            *e -= v;
            if *e == 0 {
                self.incontext.remove(k);
            }
        }
        for (k, v) in &other.count {
            let e = self.count.get_mut(k).expect("subtracting unseen count entry");
            *e -= v;
            if *e == 0 {
                self.count.remove(k);
            }
        }
    }
}

/// Attributes stripped from context keys per side (the analyzer-level
/// features that carry no disambiguation signal on that side).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IgnoreFeatures {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

impl Default for IgnoreFeatures {
    fn default() -> Self {
        IgnoreFeatures { left: vec!["poss".into()], right: vec!["case".into()] }
    }
}

/// Learner parameters. Thresholds are per specificity group, most specific
/// first; when no candidate qualifies all thresholds are damped by `d`, and
/// learning stops once the most specific threshold falls below `lower_limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub thetas: [f64; 4],
    pub damping: f64,
    pub lower_limit: f64,
    /// Delete rules fire on parses scoring below this fraction of the best.
    pub delete_fraction: f64,
    pub ignore: IgnoreFeatures,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            thetas: [7.0, 10.0, 14.0, 20.0],
            damping: 0.9,
            lower_limit: 7.0,
            delete_fraction: 0.2,
            ignore: IgnoreFeatures::default(),
        }
    }
}

/// A scored rule hypothesis: a context plus one target parse of an ambiguous
/// token observed in it (its sibling parses are the scoring competitors).
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRule {
    pub context: ContextKey,
    pub parses: Vec<FeatureStructure>,
    pub target: usize,
    pub kind: RuleKind,
}

impl CandidateRule {
    pub fn target_parse(&self) -> &FeatureStructure {
        &self.parses[self.target]
    }
}

fn slot_key(parse: &FeatureStructure, offset: isize, ignore: &IgnoreFeatures) -> FeatureStructure {
    let drops = if offset < 0 { &ignore.left } else { &ignore.right };
    let mut key = parse.clone();
    for name in drops {
        key.remove(name);
    }
    key
}

/// Context keys of `shape` at token `i`, requiring every slot neighbor to
/// exist and be unambiguous. A derived immediate-right neighbor is entered
/// twice — once with its top-level structure and once with its stem — when
/// the shape does not also constrain the second right neighbor.
fn context_keys_at(
    sent: &Sentence,
    i: usize,
    shape: Shape,
    ignore: &IgnoreFeatures,
) -> Option<Vec<ContextKey>> {
    let mut slots = Vec::with_capacity(shape.offsets().len());
    let mut rc_stem_variant: Option<(usize, FeatureStructure)> = None;
    for (slot_idx, &offset) in shape.offsets().iter().enumerate() {
        let j = i as isize + offset;
        if j < 0 || j as usize >= sent.tokens.len() {
            return None;
        }
        let neighbor = &sent.tokens[j as usize];
        if neighbor.parses.len() != 1 {
            return None;
        }
        let parse = &neighbor.parses[0];
        slots.push(slot_key(parse, offset, ignore));
        if offset == 1 && !shape.offsets().contains(&2) {
            if let Some(stem) = parse.stem() {
                rc_stem_variant = Some((slot_idx, slot_key(stem, offset, ignore)));
            }
        }
    }
    let mut keys = vec![ContextKey { shape, slots: slots.clone() }];
    if let Some((slot_idx, stem_key)) = rc_stem_variant {
        let mut alt = slots;
        alt[slot_idx] = stem_key;
        keys.push(ContextKey { shape, slots: alt });
    }
    Some(keys)
}

/// Tables contributed by a single sentence.
pub fn sentence_tables(sent: &Sentence, cfg: &LearnerConfig) -> ScoreTables {
    let mut t = ScoreTables::default();
    for (i, token) in sent.tokens.iter().enumerate() {
        if token.is_marker() || token.parses.len() != 1 {
            continue;
        }
        let parse = &token.parses[0];
        // parse entries: the top-level structure, plus the stem of a derived form
        let mut entries = vec![parse.clone()];
        if let Some(stem) = parse.stem() {
            entries.push(stem.clone());
        }
        for p in &entries {
            *t.count.entry(p.clone()).or_insert(0) += 1;
        }
        for shape in ALL_SHAPES {
            let Some(keys) = context_keys_at(sent, i, shape, &cfg.ignore) else {
                continue;
            };
            for key in keys {
                for p in &entries {
                    *t.incontext.entry((key.clone(), p.clone())).or_insert(0) += 1;
                }
            }
        }
    }
    t
}

/// Build the occurrence tables from a whole (projected) corpus.
pub fn build_tables(corpus: &Corpus, cfg: &LearnerConfig) -> ScoreTables {
    let mut t = ScoreTables::default();
    for sent in &corpus.sentences {
        t.add(&sentence_tables(sent, cfg));
    }
    t
}

/// Candidate rules rooted at the ambiguous tokens of one sentence.
pub fn sentence_candidates(sent: &Sentence, cfg: &LearnerConfig, kind: RuleKind) -> Vec<CandidateRule> {
    let shapes: &[Shape] = match kind {
        RuleKind::Choose => &ALL_SHAPES,
        RuleKind::Delete => &DELETE_SHAPES,
    };
    let mut out = Vec::new();
    for (i, token) in sent.tokens.iter().enumerate() {
        if token.is_marker() || token.parses.len() < 2 {
            continue;
        }
        for &shape in shapes {
            let Some(keys) = context_keys_at(sent, i, shape, &cfg.ignore) else {
                continue;
            };
            for key in keys {
                for target in 0..token.parses.len() {
                    out.push(CandidateRule {
                        context: key.clone(),
                        parses: token.parses.clone(),
                        target,
                        kind,
                    });
                }
            }
        }
    }
    out
}

/// Score a choose candidate: `incontext(C, P_i)` minus the strongest
/// competitor's evidence rescaled by relative overall frequency. Returns
/// `None` when the target parse was never seen unambiguously (`count = 0`).
pub fn score_choose(cand: &CandidateRule, t: &ScoreTables) -> Option<f64> {
    let p_i = cand.target_parse();
    let count_i = t.count_of(p_i);
    if count_i == 0 {
        return None;
    }
    let inc_i = t.incontext_of(&cand.context, p_i) as f64;
    // P_max maximizes (count_i / count_j) * incontext(C, P_j); competitors
    // with count 0 are skipped. Ties go to the larger count, then the
    // lexicographically smaller parse.
    let mut best: Option<(f64, u64, &FeatureStructure)> = None;
    for (j, p_j) in cand.parses.iter().enumerate() {
        if j == cand.target {
            continue;
        }
        let count_j = t.count_of(p_j);
        if count_j == 0 {
            continue;
        }
        let val = (count_i as f64 / count_j as f64) * t.incontext_of(&cand.context, p_j) as f64;
        let better = match &best {
            None => true,
            Some((bv, bc, bp)) => {
                val > *bv
                    || (val == *bv && (count_j > *bc || (count_j == *bc && p_j < *bp)))
            }
        };
        if better {
            best = Some((val, count_j, p_j));
        }
    }
    Some(match best {
        Some((subtracted, _, _)) => inc_i - subtracted,
        None => inc_i,
    })
}

/// The per-parse delete score `s(P_i) = incontext(C, P_i) / count(P_i)`
/// (0 when the parse was never seen unambiguously).
pub fn delete_score(context: &ContextKey, p: &FeatureStructure, t: &ScoreTables) -> f64 {
    let count = t.count_of(p);
    if count == 0 {
        0.0
    } else {
        t.incontext_of(context, p) as f64 / count as f64
    }
}

/// Pick the best qualifying candidate: within each specificity group sort by
/// descending score (ties: larger context, then lexicographic order); prefer
/// the most specific group whose best score clears its threshold.
pub fn select_rule<'a>(
    scored: &'a [(CandidateRule, f64)],
    cfg: &LearnerConfig,
    thetas: &[f64; 4],
) -> Option<&'a (CandidateRule, f64)> {
    let _ = cfg;
    let mut best_per_group: [Option<&(CandidateRule, f64)>; 4] = [None, None, None, None];
    for entry in scored {
        let g = entry.0.context.shape.group();
        let better = match best_per_group[g] {
            None => true,
            Some(cur) => {
                let (c, s) = (&cur.0, cur.1);
                let (n, t) = (&entry.0, entry.1);
                t > s
                    || (t == s
                        && (n.context.attr_count() > c.context.attr_count()
                            || (n.context.attr_count() == c.context.attr_count()
                                && (n.context < c.context
                                    || (n.context == c.context
                                        && n.target_parse() < c.target_parse())))))
            }
        };
        if better {
            best_per_group[g] = Some(entry);
        }
    }
    for g in 0..4 {
        if let Some(entry) = best_per_group[g] {
            if entry.1 >= thetas[g] {
                return Some(entry);
            }
        }
    }
    None
}

/// Materialize a candidate as an applicable rule.
pub fn candidate_to_rule(cand: &CandidateRule, score: f64, iteration: usize) -> ConstraintRule {
    let mut rule = ConstraintRule::new(cand.kind, Constraint::from_structure(cand.target_parse()));
    for (&offset, slot) in cand.context.shape.offsets().iter().zip(&cand.context.slots) {
        let c = Some(Constraint::from_structure(slot));
        match offset {
            -2 => rule.llc = c,
            -1 => rule.lc = c,
            1 => rule.rc = c,
            _ => rule.rrc = c,
        }
    }
    rule.provenance = Provenance::Learned;
    rule.score = Some(score);
    rule.iteration = Some(iteration);
    rule
}

/// Apply a learned rule in strict mode and update the tables incrementally:
/// every changed sentence has its old contribution subtracted and its new
/// contribution added, which is exactly equivalent to a full rebuild.
/// Returns the indices of the changed sentences.
pub fn apply_and_update(
    rule: &ConstraintRule,
    corpus: &mut Corpus,
    tables: &mut ScoreTables,
    cfg: &LearnerConfig,
) -> Vec<usize> {
    let mut changed_sentences = Vec::new();
    for (si, sent) in corpus.sentences.iter_mut().enumerate() {
        let before = sent.clone();
        let mut changed = false;
        loop {
            let mut sweep = false;
            for i in 0..sent.tokens.len() {
                sweep |= apply_at(rule, sent, i, Mode::Strict);
            }
            changed |= sweep;
            if !sweep {
                break;
            }
        }
        if changed {
            tables.subtract(&sentence_tables(&before, cfg));
            tables.add(&sentence_tables(sent, cfg));
            changed_sentences.push(si);
        }
    }
    changed_sentences
}

/// Learn choose rules from a projected corpus. The corpus is disambiguated
/// in place as rules are applied; rules are returned in learned order with
/// their selection scores.
pub fn learn_choose(corpus: &mut Corpus, cfg: &LearnerConfig) -> Vec<ConstraintRule> {
    for sent in &mut corpus.sentences {
        for token in &mut sent.tokens {
            token.dedup_parses();
        }
    }
    let mut tables = build_tables(corpus, cfg);
    let mut candidates: Vec<Vec<CandidateRule>> = corpus
        .sentences
        .iter()
        .map(|s| sentence_candidates(s, cfg, RuleKind::Choose))
        .collect();
    let mut emitted: BTreeSet<(ContextKey, FeatureStructure)> = BTreeSet::new();
    let mut rules = Vec::new();
    let mut thetas = cfg.thetas;
    loop {
        let scored: Vec<(CandidateRule, f64)> = candidates
            .iter()
            .flatten()
            .filter(|c| !emitted.contains(&(c.context.clone(), c.target_parse().clone())))
            .filter_map(|c| score_choose(c, &tables).map(|s| (c.clone(), s)))
            .collect();
        match select_rule(&scored, cfg, &thetas) {
            Some((cand, score)) => {
                emitted.insert((cand.context.clone(), cand.target_parse().clone()));
                let rule = candidate_to_rule(cand, *score, rules.len());
                for si in apply_and_update(&rule, corpus, &mut tables, cfg) {
                    candidates[si] = sentence_candidates(&corpus.sentences[si], cfg, RuleKind::Choose);
                }
                rules.push(rule);
            }
            None => {
                for t in &mut thetas {
                    *t *= cfg.damping;
                }
                if thetas[0] < cfg.lower_limit {
                    break;
                }
            }
        }
    }
    rules
}

/// Learn delete rules from a corpus already re-projected with the second
/// stage template and pre-disambiguated: in every unambiguous context around
/// a still-ambiguous token, parses whose normalized context frequency falls
/// strictly below `delete_fraction` of the best parse's yield a delete rule.
pub fn learn_delete(corpus: &Corpus, cfg: &LearnerConfig) -> Vec<ConstraintRule> {
    let tables = build_tables(corpus, cfg);
    let mut seen: BTreeSet<(ContextKey, FeatureStructure)> = BTreeSet::new();
    let mut rules = Vec::new();
    for sent in &corpus.sentences {
        for cand in sentence_candidates(sent, cfg, RuleKind::Delete) {
            if cand.target != 0 {
                continue; // scores are per-token; handle all parses at once below
            }
            let scores: Vec<f64> = cand
                .parses
                .iter()
                .map(|p| delete_score(&cand.context, p, &tables))
                .collect();
            let max = scores.iter().cloned().fold(0.0f64, f64::max);
            if max <= 0.0 {
                continue;
            }
            for (p, s) in cand.parses.iter().zip(&scores) {
                if *s < cfg.delete_fraction * max
                    && seen.insert((cand.context.clone(), p.clone()))
                {
                    let mut c = cand.clone();
                    c.target = cand.parses.iter().position(|q| q == p).unwrap();
                    rules.push(candidate_to_rule(&c, *s, rules.len()));
                }
            }
        }
    }
    rules
}

/// The rejected early variant of delete learning, kept only for comparison:
/// it reuses the choose-rule score and emits a delete for every parse with a
/// strictly negative score, which floods the rule set on real corpora.
pub fn learn_delete_by_choose_scoring(corpus: &Corpus, cfg: &LearnerConfig) -> Vec<ConstraintRule> {
    let tables = build_tables(corpus, cfg);
    let mut seen: BTreeSet<(ContextKey, FeatureStructure)> = BTreeSet::new();
    let mut rules = Vec::new();
    for sent in &corpus.sentences {
        for mut cand in sentence_candidates(sent, cfg, RuleKind::Delete) {
            cand.kind = RuleKind::Delete;
            if let Some(score) = score_choose(&cand, &tables) {
                if score < 0.0 && seen.insert((cand.context.clone(), cand.target_parse().clone())) {
                    rules.push(candidate_to_rule(&cand, score, rules.len()));
                }
            }
        }
    }
    rules
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

    /// 10 unambiguous A tokens, 2 unambiguous B tokens; after a determiner,
    /// A appears 4 times and B once.
    fn counting_corpus() -> Corpus {
        let a = fs(&[("cat", "noun")]);
        let b = fs(&[("cat", "verb")]);
        let det = fs(&[("cat", "det")]);
        let mut sentences = Vec::new();
        for _ in 0..4 {
            sentences.push(Sentence::from_body(vec![tok("d", vec![det.clone()]), tok("a", vec![a.clone()])]));
        }
        sentences.push(Sentence::from_body(vec![tok("d", vec![det.clone()]), tok("b", vec![b.clone()])]));
        for _ in 0..6 {
            sentences.push(Sentence::from_body(vec![tok("a", vec![a.clone()])]));
        }
        sentences.push(Sentence::from_body(vec![tok("b", vec![b.clone()])]));
        Corpus::new(sentences)
    }

    #[test]
    fn tables_match_hand_counts() {
        let cfg = LearnerConfig::default();
        let t = build_tables(&counting_corpus(), &cfg);
        let a = fs(&[("cat", "noun")]);
        let b = fs(&[("cat", "verb")]);
        assert_eq!(t.count_of(&a), 10);
        assert_eq!(t.count_of(&b), 2);
        let ctx = ContextKey { shape: Shape::S4L, slots: vec![fs(&[("cat", "det")])] };
        assert_eq!(t.incontext_of(&ctx, &a), 4);
        assert_eq!(t.incontext_of(&ctx, &b), 1);
    }

    #[test]
    fn choose_scores_match_worked_example() {
        let cfg = LearnerConfig::default();
        let t = build_tables(&counting_corpus(), &cfg);
        let ctx = ContextKey { shape: Shape::S4L, slots: vec![fs(&[("cat", "det")])] };
        let parses = vec![fs(&[("cat", "noun")]), fs(&[("cat", "verb")])];
        let choose_a = CandidateRule { context: ctx.clone(), parses: parses.clone(), target: 0, kind: RuleKind::Choose };
        let choose_b = CandidateRule { context: ctx, parses, target: 1, kind: RuleKind::Choose };
        // Score(A) = 4 − (10/2)·1 = −1 ; Score(B) = 1 − (2/10)·4 = 0.2
        assert_eq!(score_choose(&choose_a, &t), Some(-1.0));
        assert!((score_choose(&choose_b, &t).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn fully_ambiguous_corpus_yields_empty_tables() {
        let cfg = LearnerConfig::default();
        let p1 = fs(&[("cat", "noun")]);
        let p2 = fs(&[("cat", "verb")]);
        let corpus = Corpus::new(vec![Sentence::from_body(vec![tok("x", vec![p1, p2])])]);
        let t = build_tables(&corpus, &cfg);
        assert!(t.incontext.is_empty());
        // only the sentence markers are unambiguous, and they are skipped
        assert!(t.count.is_empty());
    }

    #[test]
    fn derived_unambiguous_token_is_entered_twice() {
        let cfg = LearnerConfig::default();
        let mut derived = fs(&[("cat", "verb")]);
        let stem = fs(&[("cat", "noun"), ("agr", "3SG")]);
        derived.set("stem", FeatureValue::Nested(Box::new(stem.clone())));
        let corpus = Corpus::new(vec![Sentence::from_body(vec![tok("masadIr", vec![derived.clone()])])]);
        let t = build_tables(&corpus, &cfg);
        assert_eq!(t.count_of(&derived), 1);
        assert_eq!(t.count_of(&stem), 1);
    }

    #[test]
    fn derived_right_neighbor_produces_a_stem_context_variant() {
        let cfg = LearnerConfig::default();
        let mut derived = fs(&[("cat", "verb")]);
        derived.set("stem", FeatureValue::Nested(Box::new(fs(&[("cat", "noun")]))));
        let sent = Sentence::from_body(vec![
            tok("bir", vec![fs(&[("cat", "adj")]), fs(&[("cat", "det")])]),
            tok("masadIr", vec![derived]),
        ]);
        let cands = sentence_candidates(&sent, &cfg, RuleKind::Choose);
        let s4r: Vec<_> = cands.iter().filter(|c| c.context.shape == Shape::S4R).collect();
        // two context variants (top-level verb and its noun stem) × two parses
        assert_eq!(s4r.len(), 4);
        let slots: BTreeSet<_> = s4r.iter().map(|c| c.context.slots[0].clone()).collect();
        assert!(slots.iter().any(|s| s.cat() == Some("verb")));
        assert!(slots.iter().any(|s| s.cat() == Some("noun")));
    }

    #[test]
    fn ignore_features_are_stripped_per_side() {
        let cfg = LearnerConfig::default();
        let left = fs(&[("cat", "noun"), ("poss", "3SG"), ("case", "gen")]);
        let right = fs(&[("cat", "noun"), ("poss", "NONE"), ("case", "acc")]);
        let sent = Sentence::from_body(vec![
            tok("l", vec![left]),
            tok("x", vec![fs(&[("cat", "noun")]), fs(&[("cat", "verb")])]),
            tok("r", vec![right]),
        ]);
        let cands = sentence_candidates(&sent, &cfg, RuleKind::Choose);
        let s3 = cands.iter().find(|c| c.context.shape == Shape::S3).unwrap();
        assert_eq!(s3.context.slots[0], fs(&[("cat", "noun"), ("case", "gen")]));
        assert_eq!(s3.context.slots[1], fs(&[("cat", "noun"), ("poss", "NONE")]));
    }

    #[test]
    fn select_rule_prefers_specific_group_meeting_threshold() {
        let cfg = LearnerConfig::default();
        let mk = |shape, score| {
            let slots = shape_slots(shape);
            (
                CandidateRule {
                    context: ContextKey { shape, slots },
                    parses: vec![fs(&[("cat", "noun")]), fs(&[("cat", "verb")])],
                    target: 0,
                    kind: RuleKind::Choose,
                },
                score,
            )
        };
        fn shape_slots(shape: Shape) -> Vec<FeatureStructure> {
            let mut p = FeatureStructure::new();
            p.set_atom("cat", "det");
            vec![p; shape.offsets().len()]
        }
        let scored = vec![mk(Shape::S1, 8.0), mk(Shape::S4L, 50.0)];
        let picked = select_rule(&scored, &cfg, &cfg.thetas).unwrap();
        assert_eq!(picked.0.context.shape, Shape::S1);
        // S1 below threshold but S4 above its own → S4 wins
        let scored = vec![mk(Shape::S1, 5.0), mk(Shape::S4L, 50.0)];
        let picked = select_rule(&scored, &cfg, &cfg.thetas).unwrap();
        assert_eq!(picked.0.context.shape, Shape::S4L);
        // nothing qualifies
        let scored = vec![mk(Shape::S1, 5.0), mk(Shape::S4L, 10.0)];
        assert!(select_rule(&scored, &cfg, &cfg.thetas).is_none());
    }

    #[test]
    fn incremental_update_equals_rebuild() {
        let cfg = LearnerConfig::default();
        let det = fs(&[("cat", "det")]);
        let noun = fs(&[("cat", "noun")]);
        let verb = fs(&[("cat", "verb")]);
        let mut corpus = Corpus::new(vec![
            Sentence::from_body(vec![tok("d", vec![det.clone()]), tok("n", vec![noun.clone()])]),
            Sentence::from_body(vec![tok("d", vec![det.clone()]), tok("x", vec![noun.clone(), verb.clone()])]),
        ]);
        let mut tables = build_tables(&corpus, &cfg);
        let cand = CandidateRule {
            context: ContextKey { shape: Shape::S4L, slots: vec![det] },
            parses: vec![noun, verb],
            target: 0,
            kind: RuleKind::Choose,
        };
        let rule = candidate_to_rule(&cand, 1.0, 0);
        let changed = apply_and_update(&rule, &mut corpus, &mut tables, &cfg);
        assert_eq!(changed, vec![1]);
        assert_eq!(tables, build_tables(&corpus, &cfg));
    }

    #[test]
    fn learn_choose_on_unambiguous_corpus_is_empty() {
        let cfg = LearnerConfig::default();
        let mut corpus = counting_corpus();
        assert!(learn_choose(&mut corpus, &cfg).is_empty());
    }

    #[test]
    fn delete_learning_flags_rare_parses() {
        let cfg = LearnerConfig::default();
        // unambiguous evidence: efter "det", noun 10 times; verb never after
        // det but 5 times elsewhere
        let det = fs(&[("cat", "det")]);
        let noun = fs(&[("cat", "noun")]);
        let verb = fs(&[("cat", "verb")]);
        let mut sentences = Vec::new();
        for _ in 0..10 {
            sentences.push(Sentence::from_body(vec![tok("d", vec![det.clone()]), tok("n", vec![noun.clone()])]));
        }
        for _ in 0..5 {
            sentences.push(Sentence::from_body(vec![tok("v", vec![verb.clone()])]));
        }
        sentences.push(Sentence::from_body(vec![tok("d", vec![det.clone()]), tok("x", vec![noun.clone(), verb.clone()])]));
        let corpus = Corpus::new(sentences);
        let rules = learn_delete(&corpus, &cfg);
        assert!(rules
            .iter()
            .any(|r| r.kind == RuleKind::Delete && r.target.subsumes(&verb) && r.lc.is_some()));
        // equal-scored parses yield nothing
        let balanced = Corpus::new(vec![Sentence::from_body(vec![
            tok("d", vec![det.clone()]),
            tok("x", vec![noun.clone(), verb.clone()]),
        ])]);
        assert!(learn_delete(&balanced, &cfg).is_empty());
    }
}
