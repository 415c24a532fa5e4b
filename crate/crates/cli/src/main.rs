//! `entail`: generate and evaluate multi-step entailment trees.

mod commands;
mod manifest;
mod pool;
mod settings;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use settings::Settings;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "entail",
    version,
    about = "Generate and evaluate multi-step entailment trees"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Configuration file with `key = value` lines (flags take precedence)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Task variant: 1 (no distractors), 2 (distractors), 3 (retrieved facts)
    #[arg(long, global = true)]
    task: Option<String>,
    /// Beam size
    #[arg(long, global = true)]
    beam: Option<usize>,
    /// Maximum reasoning depth
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Distractor fact-score threshold
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Fraction of step candidates expanded per state
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// State-score weight between mean fact score and cls score
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Similarity judge: lexical | symbolic
    #[arg(long, global = true)]
    judge: Option<String>,
    /// Similarity above which an intermediate counts as correct
    #[arg(long = "judge-threshold", global = true)]
    judge_threshold: Option<f64>,
    /// Similarity at which the target counts as proved
    #[arg(long = "prove-threshold", global = true)]
    prove_threshold: Option<f64>,
    /// Module backend: symbolic, lexical, or `remote:<url>`
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Search mode: controller | heuristic
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Evaluation alignment mode: official | strict
    #[arg(long, global = true)]
    align: Option<String>,
    /// Seed for generation and any sampling
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for batch subcommands
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Ranking-loss margins (applies to step, fact, and state margins)
    #[arg(long, global = true)]
    margin: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the search over a dataset and write one predicted tree per line
    Generate {
        /// Line-delimited dataset of problem records
        #[arg(long)]
        data: PathBuf,
        /// Precomputed retrieval file for task 3
        #[arg(long)]
        retrieval: Option<PathBuf>,
        /// Predictions file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Machine-readable per-iteration trace file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Score predictions against gold trees
    Evaluate {
        /// Predictions file from `generate`
        #[arg(long)]
        pred: PathBuf,
        /// Gold dataset
        #[arg(long)]
        gold: PathBuf,
        /// JSON report path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose gold trees into reasoning states
    Decompose {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded synthetic corpus
    Synth {
        /// Number of instances
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long = "depth-min", default_value_t = 1)]
        depth_min: usize,
        #[arg(long = "depth-max", default_value_t = 4)]
        depth_max: usize,
        #[arg(long = "distractors-min", default_value_t = 15)]
        distractors_min: usize,
        #[arg(long = "distractors-max", default_value_t = 20)]
        distractors_max: usize,
        /// Distractors share entities with the tree but fire no rule
        #[arg(long = "hard-distractors", default_value_t = false)]
        hard_distractors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank candidate one-step trees and report P@1 / NDCG
    Rank {
        /// Candidate file (question, facts, labeled candidate pairs)
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute ranking losses for scored batches
    Losses {
        /// Line-delimited loss inputs
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit codes: 0 success, 2 input error, 3 backend/transport error, 4
/// internal invariant violation.
pub enum CliError {
    Input(anyhow::Error),
    Backend(anyhow::Error),
    Internal(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Backend(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            CliError::Input(e) | CliError::Backend(e) | CliError::Internal(e) => e,
        }
    }
}

pub fn input_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

fn resolve_settings(common: &CommonArgs) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(path) = &common.config {
        s.apply_config_file(path)?;
    }
    if let Some(v) = &common.task {
        s.set("task", v)?;
    }
    if let Some(v) = common.beam {
        s.set("beam", &v.to_string())?;
    }
    if let Some(v) = common.depth {
        s.set("depth", &v.to_string())?;
    }
    if let Some(v) = common.theta {
        s.set("theta", &v.to_string())?;
    }
    if let Some(v) = common.tau {
        s.set("tau", &v.to_string())?;
    }
    if let Some(v) = common.lambda {
        s.set("lambda", &v.to_string())?;
    }
    if let Some(v) = &common.judge {
        s.set("judge", v)?;
    }
    if let Some(v) = common.judge_threshold {
        s.set("judge_threshold", &v.to_string())?;
    }
    if let Some(v) = common.prove_threshold {
        s.set("prove_threshold", &v.to_string())?;
    }
    if let Some(v) = &common.backend {
        s.set("backend", v)?;
    }
    if let Some(v) = &common.mode {
        s.set("mode", v)?;
    }
    if let Some(v) = &common.align {
        s.set("align", v)?;
    }
    if let Some(v) = common.seed {
        s.set("seed", &v.to_string())?;
    }
    if let Some(v) = common.jobs {
        s.set("jobs", &v.to_string())?;
    }
    if let Some(v) = common.margin {
        s.set("margin_step", &v.to_string())?;
        s.set("margin_fact", &v.to_string())?;
        s.set("margin_state", &v.to_string())?;
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut settings = resolve_settings(&cli.common).map_err(input_err)?;
    settings.judge = settings.effective_judge();
    match cli.command {
        Command::Generate {
            data,
            retrieval,
            out,
            trace,
        } => commands::generate::run(
            &settings,
            &data,
            retrieval.as_deref(),
            out.as_deref(),
            trace.as_deref(),
        ),
        Command::Evaluate { pred, gold, out } => {
            commands::evaluate::run(&settings, &pred, &gold, out.as_deref())
        }
        Command::Decompose { data, out } => {
            commands::decompose::run(&settings, &data, out.as_deref())
        }
        Command::Synth {
            n,
            depth_min,
            depth_max,
            distractors_min,
            distractors_max,
            hard_distractors,
            out,
        } => commands::synth::run(
            &settings,
            commands::synth::Shape {
                n,
                depth: (depth_min, depth_max),
                distractors: (distractors_min, distractors_max),
                hard: hard_distractors,
            },
            out.as_deref(),
        ),
        Command::Rank { candidates, out } => {
            commands::rank::run(&settings, &candidates, out.as_deref())
        }
        Command::Losses { data, out } => commands::losses::run(&settings, &data, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err.error());
            ExitCode::from(err.code())
        }
    }
}
