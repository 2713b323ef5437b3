//! The standard disambiguation pipeline: hand-crafted rules, contextual
//! statistics, root-frequency pruning, then learned rules, in a configurable
//! stage order; plus the two-round driver that learns choose and delete
//! rules from an ambiguous corpus.

use crate::learner::{learn_choose, learn_delete, LearnerConfig};
use crate::model::{Corpus, FeatureStructure};
use crate::preprocess::{project, project_corpus, PreprocessError, ProjectionTemplate};
use crate::rules::{apply_ruleset, ConstraintRule, FireEvent, Mode};
use crate::stats::{
    build_root_stats, context_stats_stage, root_stats_prune, ContextStatsConfig, RootStatsTable,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("bad configuration line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
}

/// One disambiguation stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    InitialChoose,
    InitialDelete,
    ContextStats,
    RootStats,
    LearnedChoose,
    LearnedDelete,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::InitialChoose => "initial-choose",
            Stage::InitialDelete => "initial-delete",
            Stage::ContextStats => "context-stats",
            Stage::RootStats => "root-stats",
            Stage::LearnedChoose => "learned-choose",
            Stage::LearnedDelete => "learned-delete",
        }
    }

    pub fn from_name(name: &str) -> Option<Stage> {
        Some(match name {
            "initial-choose" => Stage::InitialChoose,
            "initial-delete" => Stage::InitialDelete,
            "context-stats" => Stage::ContextStats,
            "root-stats" => Stage::RootStats,
            "learned-choose" => Stage::LearnedChoose,
            "learned-delete" => Stage::LearnedDelete,
            _ => return None,
        })
    }
}

pub const DEFAULT_STAGES: [Stage; 6] = [
    Stage::InitialChoose,
    Stage::InitialDelete,
    Stage::ContextStats,
    Stage::RootStats,
    Stage::LearnedChoose,
    Stage::LearnedDelete,
];

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub stages: Vec<Stage>,
    pub context: ContextStatsConfig,
    pub learner: LearnerConfig,
    /// Root-frequency pruning threshold (fraction of the best root's count).
    pub root_ratio: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stages: DEFAULT_STAGES.to_vec(),
            context: ContextStatsConfig::default(),
            learner: LearnerConfig::default(),
            root_ratio: 0.1,
        }
    }
}

/// Parse the flat `key: value` configuration format. Unset keys keep their
/// defaults; any `stage.N` key replaces the whole default stage list.
pub fn parse_config(text: &str) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = PipelineConfig::default();
    let mut stages: Vec<(usize, Stage)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| PipelineError::Config { line: ln + 1, msg };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err("expected `key: value`".into()))?;
        let key = key.trim();
        let value = value.trim();
        let num = |v: &str| v.parse::<f64>().map_err(|_| err(format!("bad number `{v}`")));
        let index = |k: &str, max: usize| {
            k.parse::<usize>()
                .ok()
                .filter(|i| *i < max)
                .ok_or_else(|| err(format!("bad index `{k}`")))
        };
        match key.split('.').collect::<Vec<_>>().as_slice() {
            ["stage", n] => {
                let stage = Stage::from_name(value).ok_or_else(|| err(format!("unknown stage `{value}`")))?;
                stages.push((index(n, usize::MAX)?, stage));
            }
            ["context", "weight", "both"] => cfg.context.weights.0 = num(value)?,
            ["context", "weight", "left"] => cfg.context.weights.1 = num(value)?,
            ["context", "weight", "right"] => cfg.context.weights.2 = num(value)?,
            ["context", "fraction", n] => cfg.context.fractions[index(n, 3)?] = num(value)?,
            ["root", "ratio"] => cfg.root_ratio = num(value)?,
            ["learner", "theta", n] => cfg.learner.thetas[index(n, 4)?] = num(value)?,
            ["learner", "damping"] => cfg.learner.damping = num(value)?,
            ["learner", "lower_limit"] => cfg.learner.lower_limit = num(value)?,
            ["learner", "delete_fraction"] => cfg.learner.delete_fraction = num(value)?,
            ["ignore", "left"] => {
                let attrs: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                cfg.learner.ignore.left = attrs.clone();
                cfg.context.ignore.left = attrs;
            }
            ["ignore", "right"] => {
                let attrs: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                cfg.learner.ignore.right = attrs.clone();
                cfg.context.ignore.right = attrs;
            }
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }
    if !stages.is_empty() {
        stages.sort_by_key(|(n, _)| *n);
        cfg.stages = stages.into_iter().map(|(_, s)| s).collect();
    }
    Ok(cfg)
}

/// Everything a pipeline run may consult besides the corpus.
#[derive(Debug, Clone)]
pub struct Resources {
    pub initial_choose: Vec<ConstraintRule>,
    pub initial_delete: Vec<ConstraintRule>,
    pub learned_choose: Vec<ConstraintRule>,
    pub learned_delete: Vec<ConstraintRule>,
    /// Root frequencies; when absent, built from the corpus being processed.
    pub root_stats: Option<RootStatsTable>,
    /// Projection used when keying contextual statistics.
    pub template: ProjectionTemplate,
    /// Projection for the second, lexicalized learning round.
    pub template_rooted: ProjectionTemplate,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            initial_choose: Vec::new(),
            initial_delete: Vec::new(),
            learned_choose: Vec::new(),
            learned_delete: Vec::new(),
            root_stats: None,
            template: ProjectionTemplate::coarse(),
            template_rooted: ProjectionTemplate::rooted(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StageReport {
    pub stage: Stage,
    /// Rule firings or parse removals performed by the stage.
    pub changes: usize,
    pub parses_removed: usize,
    /// Corpus ambiguity after the stage.
    pub ambiguity: f64,
    pub fired: Vec<FireEvent>,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub stages: Vec<StageReport>,
}

fn projection_fn<'a>(t: &'a ProjectionTemplate) -> impl Fn(&FeatureStructure) -> FeatureStructure + 'a {
    // parses whose category the template does not know (e.g. sentence
    // markers) are keyed by their full form
    move |p: &FeatureStructure| project(p, t).unwrap_or_else(|_| p.clone())
}

/// Run the configured stages in order, mutating `corpus`.
pub fn run_pipeline(
    corpus: &mut Corpus,
    cfg: &PipelineConfig,
    res: &Resources,
) -> Result<RunReport, PipelineError> {
    let mut report = RunReport::default();
    for &stage in &cfg.stages {
        let before = corpus.parse_count();
        let (changes, fired) = match stage {
            Stage::InitialChoose => apply_ruleset(&res.initial_choose, corpus, Mode::HandCrafted),
            Stage::InitialDelete => apply_ruleset(&res.initial_delete, corpus, Mode::HandCrafted),
            Stage::LearnedChoose => apply_ruleset(&res.learned_choose, corpus, Mode::Strict),
            Stage::LearnedDelete => apply_ruleset(&res.learned_delete, corpus, Mode::Strict),
            Stage::ContextStats => {
                let removed = context_stats_stage(corpus, &cfg.context, &projection_fn(&res.template));
                (removed, Vec::new())
            }
            Stage::RootStats => {
                let built;
                let table = match &res.root_stats {
                    Some(t) => t,
                    None => {
                        built = build_root_stats(corpus);
                        &built
                    }
                };
                (root_stats_prune(corpus, table, cfg.root_ratio), Vec::new())
            }
        };
        report.stages.push(StageReport {
            stage,
            changes,
            parses_removed: before - corpus.parse_count(),
            ambiguity: corpus.ambiguity(),
            fired,
        });
    }
    Ok(report)
}

/// Learned rule sets from the two unsupervised rounds.
#[derive(Debug, Clone, Default)]
pub struct LearnedRules {
    pub choose: Vec<ConstraintRule>,
    pub delete: Vec<ConstraintRule>,
}

/// Learn choose rules from the coarse projection of the corpus, then delete
/// rules from the lexicalized projection after the learned choose rules have
/// done their work. Hand-crafted rules run first in both rounds.
pub fn learn_rules(
    corpus: &Corpus,
    cfg: &PipelineConfig,
    res: &Resources,
) -> Result<LearnedRules, PipelineError> {
    let mut full = corpus.clone();
    apply_ruleset(&res.initial_choose, &mut full, Mode::HandCrafted);
    apply_ruleset(&res.initial_delete, &mut full, Mode::HandCrafted);

    let mut coarse = project_corpus(&full, &res.template)?;
    let choose = learn_choose(&mut coarse, &cfg.learner);

    let mut rooted = project_corpus(&full, &res.template_rooted)?;
    apply_ruleset(&choose, &mut rooted, Mode::Strict);
    let delete = learn_delete(&rooted, &cfg.learner);
    Ok(LearnedRules { choose, delete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_corpus_text, parse_rules};

    #[test]
    fn default_config_and_overrides() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        let cfg = parse_config(
            "# comment\n\
             stage.0: initial-choose\n\
             stage.1: root-stats\n\
             root.ratio: 0.25\n\
             learner.theta.2: 11\n\
             context.fraction.1: 0.5\n\
             ignore.left: poss agr\n",
        )
        .unwrap();
        assert_eq!(cfg.stages, vec![Stage::InitialChoose, Stage::RootStats]);
        assert_eq!(cfg.root_ratio, 0.25);
        assert_eq!(cfg.learner.thetas[2], 11.0);
        assert_eq!(cfg.context.fractions[1], 0.5);
        assert_eq!(cfg.learner.ignore.left, vec!["poss", "agr"]);
        assert_eq!(cfg.context.ignore.left, vec!["poss", "agr"]);
        assert!(parse_config("bogus: 1\n").is_err());
        assert!(parse_config("stage.0: warp\n").is_err());
    }

    #[test]
    fn stage_names_round_trip() {
        for s in DEFAULT_STAGES {
            assert_eq!(Stage::from_name(s.name()), Some(s));
        }
    }

    #[test]
    fn rule_stages_prune_and_report() {
        let mut corpus = parse_corpus_text(concat!(
            "[[@,[[cat:beginning_of_sentence]]],",
            "[bir,[[cat:det,root:bir],[cat:adj,root:bir]]],",
            "[ev,[[cat:noun,root:ev,agr:'3SG',poss:'NONE',case:nom]]],",
            "[#,[[cat:end_of_sentence]]]].\n"
        ))
        .unwrap();
        let res = Resources {
            initial_choose: parse_rules("[llc:[],lc:[],choose:[cat:det],rc:[[cat:noun]],rrc:[]].\n").unwrap(),
            ..Resources::default()
        };
        let cfg = PipelineConfig { stages: vec![Stage::InitialChoose], ..Default::default() };
        let report = run_pipeline(&mut corpus, &cfg, &res).unwrap();
        assert_eq!(report.stages[0].changes, 1);
        assert_eq!(report.stages[0].parses_removed, 1);
        assert_eq!(corpus.sentences[0].tokens[1].parses.len(), 1);
        assert_eq!(report.stages[0].fired[0].surface, "bir");
        // a second run is a no-op
        let report = run_pipeline(&mut corpus, &cfg, &res).unwrap();
        assert_eq!(report.stages[0].parses_removed, 0);
    }

    #[test]
    fn learning_driver_produces_strictly_applicable_rules() {
        // repeated unambiguous det+noun contexts teach the learner that a
        // det/adj ambiguity before a noun resolves to det
        let unambiguous: String = (0..30)
            .map(|i| {
                format!(
                    "[[@,[[cat:beginning_of_sentence]]],\
                     [bir,[[cat:det,root:bir]]],\
                     [ev{i},[[cat:noun,root:ev{i},agr:'3SG',poss:'NONE',case:nom]]],\
                     [#,[[cat:end_of_sentence]]]].\n"
                )
            })
            .collect();
        let ambiguous = "[[@,[[cat:beginning_of_sentence]]],\
                         [bir,[[cat:det,root:bir],[cat:adj,root:bir]]],\
                         [ev,[[cat:noun,root:ev,agr:'3SG',poss:'NONE',case:nom]]],\
                         [#,[[cat:end_of_sentence]]]].\n";
        let corpus = parse_corpus_text(&format!("{unambiguous}{ambiguous}")).unwrap();
        let cfg = PipelineConfig::default();
        let res = Resources::default();
        let learned = learn_rules(&corpus, &cfg, &res).unwrap();
        assert!(!learned.choose.is_empty());
        let mut work = corpus.clone();
        let resources = Resources { learned_choose: learned.choose, ..Resources::default() };
        let run_cfg = PipelineConfig { stages: vec![Stage::LearnedChoose], ..Default::default() };
        let report = run_pipeline(&mut work, &run_cfg, &resources).unwrap();
        assert!(report.stages[0].changes > 0);
        assert_eq!(work.sentences.last().unwrap().tokens[1].parses.len(), 1);
        assert_eq!(work.sentences.last().unwrap().tokens[1].parses[0].cat(), Some("det"));
    }
}
