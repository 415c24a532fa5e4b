//! Shared command plumbing: judges, module sets, search configs, output.

use crate::settings::{BackendChoice, JudgeChoice, ModeChoice, Settings};
use crate::CliError;
use entail_core::dataio::Task;
use entail_core::entailment::remote::{RemoteConfig, RemoteModule};
use entail_core::entailment::ModuleSet;
use entail_core::fact::Fact;
use entail_core::judge::{LexicalJudge, SimilarityJudge, SymbolicJudge};
use entail_core::search::{SearchConfig, SearchMode};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Judge selected at runtime.
#[derive(Clone, Copy)]
pub enum AnyJudge {
    Lexical(LexicalJudge),
    Symbolic(SymbolicJudge),
}

impl SimilarityJudge for AnyJudge {
    fn similarity(&self, a: &Fact, b: &Fact) -> f64 {
        match self {
            AnyJudge::Lexical(j) => j.similarity(a, b),
            AnyJudge::Symbolic(j) => j.similarity(a, b),
        }
    }
}

pub fn build_judge(settings: &Settings) -> AnyJudge {
    match settings.judge {
        JudgeChoice::Lexical => AnyJudge::Lexical(LexicalJudge),
        JudgeChoice::Symbolic => AnyJudge::Symbolic(SymbolicJudge),
    }
}

pub fn build_modules(settings: &Settings) -> ModuleSet {
    match &settings.backend {
        BackendChoice::Symbolic | BackendChoice::Lexical => ModuleSet::symbolic(),
        BackendChoice::Remote(url) => {
            ModuleSet::uniform(Arc::new(RemoteModule::new(url, RemoteConfig::default())))
        }
    }
}

pub fn task_of(settings: &Settings) -> Task {
    match settings.task {
        1 => Task::One,
        2 => Task::Two,
        _ => Task::Three,
    }
}

pub fn search_config(settings: &Settings) -> SearchConfig {
    SearchConfig {
        beam_size: settings.beam,
        max_depth: settings.depth,
        theta: settings.theta,
        tau: settings.tau,
        mode: match settings.mode {
            ModeChoice::Heuristic => SearchMode::Heuristic,
            ModeChoice::Controller => match settings.task {
                1 => SearchMode::Task1,
                2 => SearchMode::Task2,
                _ => SearchMode::Task3,
            },
        },
        prove_threshold: settings.prove_threshold,
        controller: entail_core::controller::ControllerConfig {
            lambda: settings.lambda,
            m_step: settings.margin_step,
            m_fact: settings.margin_fact,
            m_state: settings.margin_state,
            theta: settings.theta,
        },
    }
}

/// Write lines to the path, or to stdout when no path is given.
pub fn write_lines(out: Option<&Path>, lines: &[String]) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut body = lines.join("\n");
            if !body.is_empty() {
                body.push('\n');
            }
            std::fs::write(path, body).map_err(|e| CliError::Input(e.into()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for line in lines {
                writeln!(lock, "{line}").map_err(|e| CliError::Internal(e.into()))?;
            }
            Ok(())
        }
    }
}
