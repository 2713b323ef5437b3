//! Gold-standard evaluation: recall, precision, ambiguity, accuracy, plus
//! sentence-level and unknown-word breakdowns.
//!
//! A token is *received appropriate* when its remaining parse set contains
//! the gold parse. Recall = received appropriate / intended; precision =
//! received appropriate / all received parses. Counts are kept as exact
//! integers so ratios can be checked rationally.

use crate::model::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("corpora misaligned: {0}")]
    Misaligned(String),
    #[error("gold token `{0}` has {1} parses (expected exactly 1)")]
    AmbiguousGold(String, usize),
}

/// Integer evaluation counts over the aligned, counted tokens.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounts {
    /// Number of counted tokens (each intends exactly one appropriate parse).
    pub intended: u64,
    /// Tokens whose parse set still contains the gold parse.
    pub received_appropriate: u64,
    /// Total parses remaining over counted tokens.
    pub all_received: u64,
}

impl EvalCounts {
    pub fn recall(&self) -> f64 {
        if self.intended == 0 { 0.0 } else { self.received_appropriate as f64 / self.intended as f64 }
    }

    pub fn precision(&self) -> f64 {
        if self.all_received == 0 {
            0.0
        } else {
            self.received_appropriate as f64 / self.all_received as f64
        }
    }

    pub fn ambiguity(&self) -> f64 {
        if self.intended == 0 { 0.0 } else { self.all_received as f64 / self.intended as f64 }
    }

    /// Accuracy is only meaningful when every token is unambiguous, i.e.
    /// recall = precision.
    pub fn accuracy(&self) -> Option<f64> {
        (self.intended == self.all_received).then(|| self.recall())
    }
}

/// Sentence-level breakdown.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceRows {
    pub sentences: u64,
    /// All tokens correct and unambiguous.
    pub unambiguous_correct: u64,
    /// All tokens correct, at least one still ambiguous.
    pub ambiguous_correct: u64,
    /// Histogram of sentences by wrong-token count: 1, 2, 3, more than 3.
    pub wrong_histogram: [u64; 4],
}

/// Unknown-word effectiveness counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnknownRows {
    /// Tokens the analyzer could not parse.
    pub unknown: u64,
    /// Unknown tokens the guesser produced parses for.
    pub parsed: u64,
    /// Unknown tokens whose final parse set contains the gold parse.
    pub correct: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub counts: EvalCounts,
    pub sentences: SentenceRows,
    pub unknown: UnknownRows,
}

fn contains_gold(
    system: &AmbiguousToken,
    gold: &AmbiguousToken,
    project: Option<&dyn Fn(&FeatureStructure) -> FeatureStructure>,
) -> bool {
    let g = &gold.parses[0];
    match project {
        None => system.parses.contains(g),
        Some(f) => {
            let pg = f(g);
            system.parses.iter().any(|p| f(p) == pg)
        }
    }
}

/// Compare a system corpus against a gold standard. When `project` is given,
/// parse equality is tested after projecting both sides.
pub fn evaluate(
    system: &Corpus,
    gold: &Corpus,
    project: Option<&dyn Fn(&FeatureStructure) -> FeatureStructure>,
) -> Result<EvalReport, EvalError> {
    if system.sentences.len() != gold.sentences.len() {
        return Err(EvalError::Misaligned(format!(
            "{} sentences vs {} in gold",
            system.sentences.len(),
            gold.sentences.len()
        )));
    }
    let mut counts = EvalCounts::default();
    let mut per_sentence: Vec<(u64, u64)> = vec![(0, 0); system.sentences.len()]; // (wrong, ambiguous)
    let mut unknown = UnknownRows::default();
    for (si, (ss, gs)) in system.sentences.iter().zip(&gold.sentences).enumerate() {
        if ss.tokens.len() != gs.tokens.len() {
            return Err(EvalError::Misaligned(format!(
                "sentence {}: {} tokens vs {} in gold",
                si + 1,
                ss.tokens.len(),
                gs.tokens.len()
            )));
        }
        for (st, gt) in ss.tokens.iter().zip(&gs.tokens) {
            if st.surface != gt.surface {
                return Err(EvalError::Misaligned(format!(
                    "sentence {}: token `{}` vs `{}` in gold",
                    si + 1,
                    st.surface,
                    gt.surface
                )));
            }
            if st.is_marker() {
                continue;
            }
            // guesser effectiveness is tracked for every analyzer-unknown
            // token, whether or not the metrics below count it
            if st.unknown {
                unknown.unknown += 1;
                if !st.parses.is_empty() {
                    unknown.parsed += 1;
                }
                if gt.parses.len() == 1 && contains_gold(st, gt, project) {
                    unknown.correct += 1;
                }
            }
            if gt.unknown {
                continue; // unknown words are excluded from the metrics
            }
            if gt.parses.len() != 1 {
                return Err(EvalError::AmbiguousGold(gt.surface.clone(), gt.parses.len()));
            }
            counts.intended += 1;
            counts.all_received += st.parses.len() as u64;
            if contains_gold(st, gt, project) {
                counts.received_appropriate += 1;
            } else {
                per_sentence[si].0 += 1;
            }
            if st.parses.len() > 1 {
                per_sentence[si].1 += 1;
            }
        }
    }
    let mut sentences = SentenceRows { sentences: system.sentences.len() as u64, ..Default::default() };
    for (wrong, ambiguous) in &per_sentence {
        match (*wrong, *ambiguous) {
            (0, 0) => sentences.unambiguous_correct += 1,
            (0, _) => sentences.ambiguous_correct += 1,
            (1, _) => sentences.wrong_histogram[0] += 1,
            (2, _) => sentences.wrong_histogram[1] += 1,
            (3, _) => sentences.wrong_histogram[2] += 1,
            _ => sentences.wrong_histogram[3] += 1,
        }
    }
    Ok(EvalReport { counts, sentences, unknown })
}

fn pct(n: u64, d: u64) -> String {
    if d == 0 { "-".to_string() } else { format!("{:.2}%", 100.0 * n as f64 / d as f64) }
}

/// Render the report as an aligned text table plus machine-readable
/// `key: value` lines.
pub fn render_report(r: &EvalReport, label: &str) -> String {
    let c = &r.counts;
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
        "", "tokens", "recall", "precision", "ambiguity", "accuracy"
    ));
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>10} {:>10.4} {:>10}\n",
        label,
        c.intended,
        pct(c.received_appropriate, c.intended),
        pct(c.received_appropriate, c.all_received),
        c.ambiguity(),
        c.accuracy().map_or("-".to_string(), |a| format!("{:.2}%", 100.0 * a)),
    ));
    out.push_str(&format!("intended: {}\n", c.intended));
    out.push_str(&format!("received_appropriate: {}\n", c.received_appropriate));
    out.push_str(&format!("all_received: {}\n", c.all_received));
    out.push_str(&format!("recall: {:.6}\n", c.recall()));
    out.push_str(&format!("precision: {:.6}\n", c.precision()));
    out.push_str(&format!("ambiguity: {:.6}\n", c.ambiguity()));
    let s = &r.sentences;
    out.push_str(&format!("sentences: {}\n", s.sentences));
    out.push_str(&format!(
        "sentences_unambiguous_correct: {} ({})\n",
        s.unambiguous_correct,
        pct(s.unambiguous_correct, s.sentences)
    ));
    out.push_str(&format!(
        "sentences_ambiguous_correct: {} ({})\n",
        s.ambiguous_correct,
        pct(s.ambiguous_correct, s.sentences)
    ));
    let labels = ["1", "2", "3", ">3"];
    for (lab, n) in labels.iter().zip(&s.wrong_histogram) {
        out.push_str(&format!("sentences_wrong_{}: {} ({})\n", lab, n, pct(*n, s.sentences)));
    }
    let u = &r.unknown;
    out.push_str(&format!("unknown: {}\n", u.unknown));
    out.push_str(&format!("unknown_parsed: {} ({})\n", u.parsed, pct(u.parsed, u.unknown)));
    out.push_str(&format!("unknown_correct: {} ({})\n", u.correct, pct(u.correct, u.unknown)));
    out
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

    fn single(surface: &str, parse: FeatureStructure) -> AmbiguousToken {
        tok(surface, vec![parse])
    }

    /// The worked four-token example: one wrong unambiguous token, one token
    /// left with two parses.
    fn worked_example() -> (Corpus, Corpus) {
        let gold_bunun = fs(&[("cat", "pronoun"), ("root", "bu"), ("agr", "3SG"), ("poss", "NONE"), ("case", "gen")]);
        let bad_bunun = fs(&[("cat", "noun"), ("root", "bun"), ("agr", "3SG"), ("poss", "NONE"), ("case", "gen")]);
        let uzerinde = fs(&[("cat", "noun"), ("root", "Uzeri"), ("agr", "3SG"), ("poss", "3SG"), ("case", "loc")]);
        let duralim = fs(&[("cat", "verb"), ("root", "dur"), ("sense", "pos"), ("tam1", "opt"), ("agr", "1PL")]);
        let duralim_alt = fs(&[("cat", "verb"), ("root", "dural"), ("sense", "pos"), ("tam1", "imp"), ("agr", "2PL")]);
        let dot = fs(&[("cat", "punct"), ("root", ".")]);
        let gold = Corpus::new(vec![Sentence::from_body(vec![
            single("bunun", gold_bunun),
            single("Uzerinde", uzerinde.clone()),
            single("duralIm", duralim.clone()),
            single(".", dot.clone()),
        ])]);
        let system = Corpus::new(vec![Sentence::from_body(vec![
            single("bunun", bad_bunun),
            single("Uzerinde", uzerinde),
            tok("duralIm", vec![duralim, duralim_alt]),
            single(".", dot),
        ])]);
        (system, gold)
    }

    #[test]
    fn worked_example_gives_exact_ratios() {
        let (system, gold) = worked_example();
        let r = evaluate(&system, &gold, None).unwrap();
        assert_eq!(r.counts.intended, 4);
        assert_eq!(r.counts.received_appropriate, 3);
        assert_eq!(r.counts.all_received, 5);
        // precision 3/5, recall 3/4, exactly
        assert_eq!(r.counts.received_appropriate * 5, r.counts.all_received * 3);
        assert_eq!(r.counts.received_appropriate * 4, r.counts.intended * 3);
        assert_eq!(r.counts.precision(), 0.6);
        assert_eq!(r.counts.recall(), 0.75);
        assert_eq!(r.counts.accuracy(), None);
    }

    #[test]
    fn identity_is_perfect() {
        let (_, gold) = worked_example();
        let r = evaluate(&gold, &gold, None).unwrap();
        assert_eq!(r.counts.recall(), 1.0);
        assert_eq!(r.counts.precision(), 1.0);
        assert_eq!(r.counts.ambiguity(), 1.0);
        assert_eq!(r.counts.accuracy(), Some(1.0));
        assert_eq!(r.sentences.unambiguous_correct, 1);
    }

    #[test]
    fn misalignment_names_the_token() {
        let (system, gold) = worked_example();
        let mut bad = system;
        bad.sentences[0].tokens[1].surface = "oops".into();
        let err = evaluate(&bad, &gold, None).unwrap_err();
        assert!(err.to_string().contains("oops"));
    }

    #[test]
    fn sentence_rows_split_correct_and_wrong() {
        let n = fs(&[("cat", "noun")]);
        let v = fs(&[("cat", "verb")]);
        let gold = Corpus::new(vec![
            Sentence::from_body(vec![single("a", n.clone())]),
            Sentence::from_body(vec![single("b", n.clone())]),
            Sentence::from_body(vec![single("c", n.clone())]),
        ]);
        let system = Corpus::new(vec![
            Sentence::from_body(vec![single("a", n.clone())]),
            Sentence::from_body(vec![tok("b", vec![n.clone(), v.clone()])]),
            Sentence::from_body(vec![single("c", v.clone())]),
        ]);
        let r = evaluate(&system, &gold, None).unwrap();
        assert_eq!(r.sentences.unambiguous_correct, 1);
        assert_eq!(r.sentences.ambiguous_correct, 1);
        assert_eq!(r.sentences.wrong_histogram, [1, 0, 0, 0]);
    }

    #[test]
    fn unknown_rows_count_guesser_effectiveness() {
        let n = fs(&[("cat", "noun"), ("root", "x")]);
        let other = fs(&[("cat", "noun"), ("root", "y")]);
        let mut gold_tok = single("x", n.clone());
        let mut sys_ok = single("x", n.clone());
        sys_ok.unknown = true;
        gold_tok.unknown = false;
        let mut sys_bad = single("z", other.clone());
        sys_bad.unknown = true;
        let gold = Corpus::new(vec![Sentence::from_body(vec![gold_tok, single("z", n.clone())])]);
        let system = Corpus::new(vec![Sentence::from_body(vec![sys_ok, sys_bad])]);
        let r = evaluate(&system, &gold, None).unwrap();
        assert_eq!(r.unknown.unknown, 2);
        assert_eq!(r.unknown.parsed, 2);
        assert_eq!(r.unknown.correct, 1);
    }

    #[test]
    fn projected_equality_can_differ_from_full() {
        let full = fs(&[("cat", "noun"), ("root", "a"), ("case", "nom")]);
        let gold_p = fs(&[("cat", "noun"), ("root", "b"), ("case", "nom")]);
        let system = Corpus::new(vec![Sentence::from_body(vec![single("x", full)])]);
        let gold = Corpus::new(vec![Sentence::from_body(vec![single("x", gold_p)])]);
        assert_eq!(evaluate(&system, &gold, None).unwrap().counts.received_appropriate, 0);
        let drop_root = |p: &FeatureStructure| {
            let mut q = p.clone();
            q.remove("root");
            q
        };
        let r = evaluate(&system, &gold, Some(&drop_root)).unwrap();
        assert_eq!(r.counts.received_appropriate, 1);
    }
}
