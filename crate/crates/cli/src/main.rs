//! `disamb`: batch front end for the disambiguation pipeline. Reports go to
//! standard output, diagnostics to standard error. Exit codes: 0 success,
//! 1 usage, 2 format error, 3 stage failure.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use disamb_core::eval::{evaluate, render_report};
use disamb_core::format::{parse_corpus_text, parse_rules, serialize_corpus, serialize_rules};
use disamb_core::model::{Corpus, FeatureStructure};
use disamb_core::pipeline::{
    learn_rules, parse_config, run_pipeline, PipelineConfig, Resources, Stage,
};
use disamb_core::preprocess::{
    corpus_stats, preprocess_text, project, CollocationDb, Lexicon, ProjectionTemplate,
    SuffixInventory,
};
use disamb_core::stats::{build_root_stats, parse_root_stats, serialize_root_stats};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "disamb", version, about = "Constraint-based morphological disambiguation")]
struct Cli {
    /// Seed for randomized harnesses built on top of this tool; the pipeline
    /// itself is deterministic and ignores it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tokenize raw text, analyze, pack collocations, guess unknown words,
    /// and emit a corpus file plus an ambiguity report.
    Preprocess {
        /// Raw text input.
        input: PathBuf,
        /// Analyzer lexicon (`surface<TAB>parse( | parse)*`).
        #[arg(long)]
        lexicon: PathBuf,
        /// Collocation database; omitted means no collocations.
        #[arg(long)]
        collocations: Option<PathBuf>,
        /// Suffix inventory for the unknown-word guesser; omitted means the
        /// built-in inventory.
        #[arg(long)]
        suffixes: Option<PathBuf>,
        /// Write the corpus here instead of standard output (the report then
        /// goes to standard output).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the disambiguation stages over a corpus file.
    Disambiguate {
        /// Corpus file.
        input: PathBuf,
        /// Hand-crafted choose rules.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Hand-crafted delete rules.
        #[arg(long)]
        delete_rules: Option<PathBuf>,
        /// Learned choose rules.
        #[arg(long)]
        learned_choose: Option<PathBuf>,
        /// Learned delete rules.
        #[arg(long)]
        learned_delete: Option<PathBuf>,
        /// Gold corpus; adds recall/precision columns to the stage report.
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Pipeline configuration (flat `key: value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Projection template used to key contextual statistics.
        #[arg(long)]
        template: Option<PathBuf>,
        /// Pre-built root frequency table; omitted means build it from the
        /// corpus being processed.
        #[arg(long)]
        root_stats: Option<PathBuf>,
        /// Write the disambiguated corpus here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Learn choose and delete rules from an ambiguous corpus.
    Learn {
        /// Corpus file.
        input: PathBuf,
        /// Hand-crafted choose rules applied before learning.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Hand-crafted delete rules applied before learning.
        #[arg(long)]
        delete_rules: Option<PathBuf>,
        /// Learner configuration (flat `key: value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output path for the learned choose rules.
        #[arg(long)]
        choose_out: PathBuf,
        /// Output path for the learned delete rules.
        #[arg(long)]
        delete_out: PathBuf,
    },
    /// Compare a system corpus against a single-parse gold corpus.
    Eval {
        /// System output corpus.
        system: PathBuf,
        /// Gold corpus (exactly one parse per token).
        gold: PathBuf,
        /// Compare parses after projecting both sides with this template.
        #[arg(long)]
        template: Option<PathBuf>,
    },
    /// Report token/parse counts and the ambiguity distribution of a corpus.
    Stats {
        /// Corpus file.
        input: PathBuf,
        /// Also print the root frequency table built from the corpus.
        #[arg(long)]
        roots: bool,
    },
}

enum Failure {
    /// Unreadable or unparsable inputs.
    Format(String),
    /// A stage could not run to completion.
    Stage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Format(_) => 2,
            Failure::Stage(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Format(m) | Failure::Stage(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Stage(format!("reading {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::Stage(format!("writing {}: {e}", path.display())))
}

fn load_corpus(path: &Path) -> Result<Corpus, Failure> {
    parse_corpus_text(&read(path)?)
        .map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn load_rules(path: &Path) -> Result<Vec<disamb_core::rules::ConstraintRule>, Failure> {
    parse_rules(&read(path)?).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&PathBuf>) -> Result<PipelineConfig, Failure> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => parse_config(&read(p)?)
            .map_err(|e| Failure::Format(format!("{}: {e}", p.display()))),
    }
}

fn load_resources(
    rules: Option<&PathBuf>,
    delete_rules: Option<&PathBuf>,
    learned_choose: Option<&PathBuf>,
    learned_delete: Option<&PathBuf>,
    template: Option<&PathBuf>,
    root_stats: Option<&PathBuf>,
) -> Result<Resources, Failure> {
    let mut res = Resources::default();
    if let Some(p) = rules {
        res.initial_choose = load_rules(p)?;
    }
    if let Some(p) = delete_rules {
        res.initial_delete = load_rules(p)?;
    }
    if let Some(p) = learned_choose {
        res.learned_choose = load_rules(p)?;
    }
    if let Some(p) = learned_delete {
        res.learned_delete = load_rules(p)?;
    }
    if let Some(p) = template {
        res.template = ProjectionTemplate::parse(&read(p)?)
            .map_err(|e| Failure::Format(format!("{}: {e}", p.display())))?;
    }
    if let Some(p) = root_stats {
        res.root_stats = Some(
            parse_root_stats(&read(p)?)
                .map_err(|e| Failure::Format(format!("{}: {e}", p.display())))?,
        );
    }
    Ok(res)
}

/// A stage is enabled only when its inputs were supplied.
fn enabled_stages(cfg: &PipelineConfig, res: &Resources) -> Vec<Stage> {
    cfg.stages
        .iter()
        .copied()
        .filter(|s| match s {
            Stage::InitialChoose => !res.initial_choose.is_empty(),
            Stage::InitialDelete => !res.initial_delete.is_empty(),
            Stage::LearnedChoose => !res.learned_choose.is_empty(),
            Stage::LearnedDelete => !res.learned_delete.is_empty(),
            Stage::ContextStats | Stage::RootStats => true,
        })
        .collect()
}

fn agreement_columns(corpus: &Corpus, gold: Option<&Corpus>) -> Result<String, Failure> {
    let Some(gold) = gold else { return Ok(String::new()) };
    let r = evaluate(corpus, gold, None)
        .map_err(|e| Failure::Stage(format!("gold comparison: {e}")))?;
    Ok(format!(
        " {:>9.2}% {:>9.2}%",
        100.0 * r.counts.recall(),
        100.0 * r.counts.precision()
    ))
}

fn cmd_disambiguate(
    input: &Path,
    res: Resources,
    mut cfg: PipelineConfig,
    gold: Option<&PathBuf>,
    output: Option<&PathBuf>,
) -> Result<(), Failure> {
    let mut corpus = load_corpus(input)?;
    let gold = gold.map(|p| load_corpus(p)).transpose()?;
    cfg.stages = enabled_stages(&cfg, &res);

    let mut report = String::new();
    report.push_str(&format!("{:<16} {:>8} {:>8} {:>9}", "stage", "changes", "removed", "ambiguity"));
    if gold.is_some() {
        report.push_str(&format!(" {:>10} {:>10}", "recall", "precision"));
    }
    report.push('\n');
    report.push_str(&format!(
        "{:<16} {:>8} {:>8} {:>9.4}{}\n",
        "base",
        "-",
        "-",
        corpus.ambiguity(),
        agreement_columns(&corpus, gold.as_ref())?
    ));
    // one stage at a time so the gold columns track the pipeline
    for stage in cfg.stages.clone() {
        let one = PipelineConfig { stages: vec![stage], ..cfg.clone() };
        let run = run_pipeline(&mut corpus, &one, &res)
            .map_err(|e| Failure::Stage(format!("stage {}: {e}", stage.name())))?;
        let s = &run.stages[0];
        report.push_str(&format!(
            "{:<16} {:>8} {:>8} {:>9.4}{}\n",
            stage.name(),
            s.changes,
            s.parses_removed,
            s.ambiguity,
            agreement_columns(&corpus, gold.as_ref())?
        ));
    }

    let text = serialize_corpus(&corpus);
    match output {
        Some(p) => {
            write(p, &text)?;
            print!("{report}");
        }
        None => {
            print!("{text}");
            eprint!("{report}");
        }
    }
    Ok(())
}

fn cmd_preprocess(
    input: &Path,
    lexicon: &Path,
    collocations: Option<&PathBuf>,
    suffixes: Option<&PathBuf>,
    output: Option<&PathBuf>,
) -> Result<(), Failure> {
    let raw = read(input)?;
    let lex = Lexicon::parse(&read(lexicon)?)
        .map_err(|e| Failure::Format(format!("{}: {e}", lexicon.display())))?;
    let db = match collocations {
        Some(p) => CollocationDb::parse(&read(p)?)
            .map_err(|e| Failure::Format(format!("{}: {e}", p.display())))?,
        None => CollocationDb::parse("").expect("empty collocation db"),
    };
    let inv = match suffixes {
        Some(p) => SuffixInventory::parse(&read(p)?)
            .map_err(|e| Failure::Format(format!("{}: {e}", p.display())))?,
        None => SuffixInventory::standard(),
    };
    let (corpus, stats) =
        preprocess_text(&raw, &lex, &db, &inv).map_err(|e| Failure::Stage(e.to_string()))?;
    let text = serialize_corpus(&corpus);
    match output {
        Some(p) => {
            write(p, &text)?;
            print!("{}", stats.render());
        }
        None => {
            print!("{text}");
            eprint!("{}", stats.render());
        }
    }
    Ok(())
}

fn cmd_learn(
    input: &Path,
    res: Resources,
    cfg: PipelineConfig,
    choose_out: &Path,
    delete_out: &Path,
) -> Result<(), Failure> {
    let corpus = load_corpus(input)?;
    let learned =
        learn_rules(&corpus, &cfg, &res).map_err(|e| Failure::Stage(e.to_string()))?;
    write(choose_out, &serialize_rules(&learned.choose))?;
    write(delete_out, &serialize_rules(&learned.delete))?;
    println!("choose_rules: {}", learned.choose.len());
    println!("delete_rules: {}", learned.delete.len());
    Ok(())
}

fn cmd_eval(system: &Path, gold: &Path, template: Option<&PathBuf>) -> Result<(), Failure> {
    let sys = load_corpus(system)?;
    let gold_corpus = load_corpus(gold)?;
    let template = template
        .map(|p| {
            ProjectionTemplate::parse(&read(p)?)
                .map_err(|e| Failure::Format(format!("{}: {e}", p.display())))
        })
        .transpose()?;
    let projector = template.as_ref().map(|t| {
        move |p: &FeatureStructure| project(p, t).unwrap_or_else(|_| p.clone())
    });
    let r = match &projector {
        Some(f) => evaluate(&sys, &gold_corpus, Some(f)),
        None => evaluate(&sys, &gold_corpus, None),
    }
    .map_err(|e| Failure::Stage(e.to_string()))?;
    print!("{}", render_report(&r, "system"));
    Ok(())
}

fn cmd_stats(input: &Path, roots: bool) -> Result<(), Failure> {
    let corpus = load_corpus(input)?;
    print!("{}", corpus_stats(&corpus).render());
    if roots {
        print!("{}", serialize_root_stats(&build_root_stats(&corpus)));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Preprocess { input, lexicon, collocations, suffixes, output } => {
            cmd_preprocess(input, lexicon, collocations.as_ref(), suffixes.as_ref(), output.as_ref())
        }
        Cmd::Disambiguate {
            input,
            rules,
            delete_rules,
            learned_choose,
            learned_delete,
            gold,
            config,
            template,
            root_stats,
            output,
        } => {
            let res = load_resources(
                rules.as_ref(),
                delete_rules.as_ref(),
                learned_choose.as_ref(),
                learned_delete.as_ref(),
                template.as_ref(),
                root_stats.as_ref(),
            )?;
            let cfg = load_config(config.as_ref())?;
            cmd_disambiguate(input, res, cfg, gold.as_ref(), output.as_ref())
        }
        Cmd::Learn { input, rules, delete_rules, config, choose_out, delete_out } => {
            let res = load_resources(rules.as_ref(), delete_rules.as_ref(), None, None, None, None)?;
            let cfg = load_config(config.as_ref())?;
            cmd_learn(input, res, cfg, choose_out, delete_out)
        }
        Cmd::Eval { system, gold, template } => cmd_eval(system, gold, template.as_ref()),
        Cmd::Stats { input, roots } => cmd_stats(input, *roots),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are successes, everything else is a
            // usage error
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("disamb: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
