//! Choose/delete constraint rules and their application to corpora.
//!
//! A rule constrains up to four context positions (llc, lc, rc, rrc at
//! i−2…i+2) and carries a target pattern. `choose` keeps only the parses of
//! the focus token matched by the target; `delete` removes them. Hand-crafted
//! rules may match ambiguous neighbors (and then reduce them simultaneously);
//! learned rules require unambiguous neighbors.

use crate::model::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Choose,
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    HandCrafted,
    Learned,
}

/// How context slots treat ambiguous neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Slots may match any parse of a neighbor; matched ambiguous neighbors
    /// are reduced together with the focus token.
    HandCrafted,
    /// Slots only match unambiguous neighbors. For `rc`, a derived neighbor
    /// also matches when its stem structure is subsumed.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRule {
    pub kind: RuleKind,
    pub llc: Option<Constraint>,
    pub lc: Option<Constraint>,
    pub rc: Option<Constraint>,
    pub rrc: Option<Constraint>,
    pub target: Constraint,
    /// Surface condition on the focus token (normalized lowercase).
    pub token: Option<String>,
    pub provenance: Provenance,
    pub score: Option<f64>,
    pub iteration: Option<usize>,
}

impl ConstraintRule {
    pub fn new(kind: RuleKind, target: Constraint) -> Self {
        ConstraintRule {
            kind,
            llc: None,
            lc: None,
            rc: None,
            rrc: None,
            target,
            token: None,
            provenance: Provenance::HandCrafted,
            score: None,
            iteration: None,
        }
    }

    fn slots(&self) -> [(&Option<Constraint>, isize); 4] {
        [(&self.llc, -2), (&self.lc, -1), (&self.rc, 1), (&self.rrc, 2)]
    }
}

/// Parse indices matched per slot (order llc, lc, rc, rrc); `None` for
/// unconstrained slots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Binding {
    pub slot_matches: [Option<Vec<usize>>; 4],
}

fn slot_matches(
    c: &Constraint,
    neighbor: &AmbiguousToken,
    is_rc: bool,
    mode: Mode,
) -> Option<Vec<usize>> {
    match mode {
        Mode::Strict => {
            if neighbor.parses.len() != 1 {
                return None;
            }
            let p = &neighbor.parses[0];
            let direct = c.subsumes(p);
            let via_stem = is_rc && p.stem().is_some_and(|s| c.subsumes(s));
            (direct || via_stem).then(|| vec![0])
        }
        Mode::HandCrafted => {
            let hits: Vec<usize> = neighbor
                .parses
                .iter()
                .enumerate()
                .filter(|(_, p)| c.subsumes(p))
                .map(|(i, _)| i)
                .collect();
            (!hits.is_empty()).then_some(hits)
        }
    }
}

/// Try to match a rule's context at token `i` of `sent`.
pub fn match_context(rule: &ConstraintRule, sent: &Sentence, i: usize, mode: Mode) -> Option<Binding> {
    let mut binding = Binding::default();
    for (slot_idx, (slot, offset)) in rule.slots().into_iter().enumerate() {
        if let Some(c) = slot {
            let j = i as isize + offset;
            if j < 0 || j as usize >= sent.tokens.len() {
                return None;
            }
            let neighbor = &sent.tokens[j as usize];
            binding.slot_matches[slot_idx] =
                Some(slot_matches(c, neighbor, offset == 1, mode)?);
        }
    }
    Some(binding)
}

fn retain_indices(parses: &mut Vec<FeatureStructure>, keep: &[usize]) -> bool {
    if keep.len() >= parses.len() {
        return false;
    }
    let mut i = 0;
    parses.retain(|_| {
        let k = keep.contains(&i);
        i += 1;
        k
    });
    true
}

/// Apply a matched choose rule at token `i`. Returns whether anything changed.
pub fn apply_choose(rule: &ConstraintRule, sent: &mut Sentence, i: usize, binding: &Binding, mode: Mode) -> bool {
    debug_assert_eq!(rule.kind, RuleKind::Choose);
    let keep: Vec<usize> = sent.tokens[i]
        .parses
        .iter()
        .enumerate()
        .filter(|(_, p)| rule.target.subsumes(p))
        .map(|(j, _)| j)
        .collect();
    if keep.is_empty() {
        return false;
    }
    let mut changed = retain_indices(&mut sent.tokens[i].parses, &keep);
    if mode == Mode::HandCrafted {
        // simultaneous disambiguation: matched ambiguous neighbors are
        // reduced to the parses the slot matched
        for (slot_idx, offset) in [(0usize, -2isize), (1, -1), (2, 1), (3, 2)] {
            if let Some(hits) = &binding.slot_matches[slot_idx] {
                let j = (i as isize + offset) as usize;
                changed |= retain_indices(&mut sent.tokens[j].parses, hits);
            }
        }
    }
    changed
}

/// Apply a matched delete rule at token `i`. Deletion that would empty the
/// parse list is suppressed. Returns whether anything changed.
pub fn apply_delete(rule: &ConstraintRule, sent: &mut Sentence, i: usize) -> bool {
    debug_assert_eq!(rule.kind, RuleKind::Delete);
    let keep: Vec<usize> = sent.tokens[i]
        .parses
        .iter()
        .enumerate()
        .filter(|(_, p)| !rule.target.subsumes(p))
        .map(|(j, _)| j)
        .collect();
    if keep.is_empty() {
        return false; // empty-guard: never delete the last parse(s)
    }
    retain_indices(&mut sent.tokens[i].parses, &keep)
}

/// One observed rule application, for observability in reports and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct FireEvent {
    pub rule_index: usize,
    pub sentence: usize,
    pub token_index: usize,
    pub surface: String,
}

/// Apply one rule at one position if its conditions hold.
pub fn apply_at(rule: &ConstraintRule, sent: &mut Sentence, i: usize, mode: Mode) -> bool {
    let token = &sent.tokens[i];
    if token.is_marker() || token.parses.len() < 2 {
        return false;
    }
    if let Some(want) = &rule.token {
        if normalize_surface(&token.surface) != *want {
            return false;
        }
    }
    let Some(binding) = match_context(rule, sent, i, mode) else {
        return false;
    };
    match rule.kind {
        RuleKind::Choose => apply_choose(rule, sent, i, &binding, mode),
        RuleKind::Delete => apply_delete(rule, sent, i),
    }
}

/// Apply a rule set to a whole corpus until a full sweep makes no change.
/// Sweeps are rule-major in file order, positions left to right. Returns the
/// total change count and the log of rule firings.
pub fn apply_ruleset(
    rules: &[ConstraintRule],
    corpus: &mut Corpus,
    mode: Mode,
) -> (usize, Vec<FireEvent>) {
    let mut total = 0;
    let mut log = Vec::new();
    loop {
        let mut sweep_changes = 0;
        for (ri, rule) in rules.iter().enumerate() {
            for (si, sent) in corpus.sentences.iter_mut().enumerate() {
                for i in 0..sent.tokens.len() {
                    if apply_at(rule, sent, i, mode) {
                        sweep_changes += 1;
                        log.push(FireEvent {
                            rule_index: ri,
                            sentence: si,
                            token_index: i,
                            surface: sent.tokens[i].surface.clone(),
                        });
                    }
                }
            }
        }
        total += sweep_changes;
        if sweep_changes == 0 {
            break;
        }
    }
    (total, log)
}
