//! Run settings with flag > config-file > built-in default precedence.

use anyhow::{bail, Context, Result};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JudgeChoice {
    Lexical,
    Symbolic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendChoice {
    Symbolic,
    Lexical,
    Remote(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Controller,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignChoice {
    Official,
    Strict,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub task: u8,
    pub beam: usize,
    pub depth: usize,
    pub theta: f64,
    pub tau: f64,
    pub lambda: f64,
    pub margin_step: f64,
    pub margin_fact: f64,
    pub margin_state: f64,
    pub judge: JudgeChoice,
    /// True once a judge was chosen explicitly (flag or config file).
    pub judge_explicit: bool,
    pub judge_threshold: f64,
    pub prove_threshold: f64,
    pub backend: BackendChoice,
    pub mode: ModeChoice,
    pub align: AlignChoice,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            task: 1,
            beam: 10,
            depth: 5,
            theta: 0.001,
            tau: 0.10,
            lambda: 0.5,
            margin_step: 0.1,
            margin_fact: 0.1,
            margin_state: 0.1,
            judge: JudgeChoice::Lexical,
            judge_explicit: false,
            judge_threshold: 0.55,
            prove_threshold: 1.0,
            backend: BackendChoice::Symbolic,
            mode: ModeChoice::Controller,
            align: AlignChoice::Official,
            seed: 0,
            jobs: 1,
        }
    }
}

impl Settings {
    /// The judge in effect: an explicit choice wins, otherwise the backend
    /// implies one (symbolic backend pairs with the symbolic judge).
    pub fn effective_judge(&self) -> JudgeChoice {
        if self.judge_explicit {
            return self.judge;
        }
        match self.backend {
            BackendChoice::Symbolic => JudgeChoice::Symbolic,
            BackendChoice::Lexical | BackendChoice::Remote(_) => JudgeChoice::Lexical,
        }
    }

    /// The resolved configuration as sorted key/value pairs (for manifests).
    pub fn as_pairs(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        out.insert("task".into(), self.task.to_string());
        out.insert("beam".into(), self.beam.to_string());
        out.insert("depth".into(), self.depth.to_string());
        out.insert("theta".into(), self.theta.to_string());
        out.insert("tau".into(), self.tau.to_string());
        out.insert("lambda".into(), self.lambda.to_string());
        out.insert("margin_step".into(), self.margin_step.to_string());
        out.insert("margin_fact".into(), self.margin_fact.to_string());
        out.insert("margin_state".into(), self.margin_state.to_string());
        out.insert("judge".into(), format!("{:?}", self.judge).to_lowercase());
        out.insert("judge_threshold".into(), self.judge_threshold.to_string());
        out.insert("prove_threshold".into(), self.prove_threshold.to_string());
        out.insert(
            "backend".into(),
            match &self.backend {
                BackendChoice::Symbolic => "symbolic".into(),
                BackendChoice::Lexical => "lexical".into(),
                BackendChoice::Remote(url) => format!("remote:{url}"),
            },
        );
        out.insert(
            "mode".into(),
            match self.mode {
                ModeChoice::Controller => "controller".into(),
                ModeChoice::Heuristic => "heuristic".into(),
            },
        );
        out.insert(
            "align".into(),
            match self.align {
                AlignChoice::Official => "official".into(),
                AlignChoice::Strict => "strict".into(),
            },
        );
        out.insert("seed".into(), self.seed.to_string());
        out.insert("jobs".into(), self.jobs.to_string());
        out
    }

    /// Apply one key/value pair (config file or flag layer).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "task" => self.task = parse_task(value)?,
            "beam" => self.beam = value.parse().context("beam must be a positive integer")?,
            "depth" => self.depth = value.parse().context("depth must be a positive integer")?,
            "theta" => self.theta = parse_unit(value, "theta")?,
            "tau" => self.tau = parse_unit(value, "tau")?,
            "lambda" => self.lambda = parse_unit(value, "lambda")?,
            "margin_step" => self.margin_step = parse_nonneg(value, "margin_step")?,
            "margin_fact" => self.margin_fact = parse_nonneg(value, "margin_fact")?,
            "margin_state" => self.margin_state = parse_nonneg(value, "margin_state")?,
            "judge" => {
                self.judge = parse_judge(value)?;
                self.judge_explicit = true;
            }
            "judge_threshold" => self.judge_threshold = parse_unit(value, "judge_threshold")?,
            "prove_threshold" => self.prove_threshold = parse_unit(value, "prove_threshold")?,
            "backend" => self.backend = parse_backend(value)?,
            "mode" => self.mode = parse_mode(value)?,
            "align" => self.align = parse_align(value)?,
            "seed" => self.seed = value.parse().context("seed must be an integer")?,
            "jobs" => self.jobs = value.parse().context("jobs must be a positive integer")?,
            other => bail!("unknown configuration key '{other}'"),
        }
        Ok(())
    }

    /// Load `key = value` lines; `#` starts a comment.
    pub fn apply_config_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected 'key = value'", lineno + 1);
            };
            self.set(key.trim(), value.trim())
                .with_context(|| format!("config line {}", lineno + 1))?;
        }
        Ok(())
    }
}

pub fn parse_task(value: &str) -> Result<u8> {
    match value {
        "1" => Ok(1),
        "2" => Ok(2),
        "3" => Ok(3),
        other => bail!("task must be 1, 2, or 3 (got '{other}')"),
    }
}

pub fn parse_judge(value: &str) -> Result<JudgeChoice> {
    match value {
        "lexical" => Ok(JudgeChoice::Lexical),
        "symbolic" => Ok(JudgeChoice::Symbolic),
        other => bail!("judge must be lexical or symbolic (got '{other}')"),
    }
}

pub fn parse_backend(value: &str) -> Result<BackendChoice> {
    match value {
        "symbolic" => Ok(BackendChoice::Symbolic),
        "lexical" => Ok(BackendChoice::Lexical),
        other => match other.strip_prefix("remote:") {
            Some(url) if !url.is_empty() => Ok(BackendChoice::Remote(url.to_string())),
            _ => bail!("backend must be symbolic, lexical, or remote:<url> (got '{other}')"),
        },
    }
}

pub fn parse_mode(value: &str) -> Result<ModeChoice> {
    match value {
        "controller" => Ok(ModeChoice::Controller),
        "heuristic" => Ok(ModeChoice::Heuristic),
        other => bail!("mode must be controller or heuristic (got '{other}')"),
    }
}

pub fn parse_align(value: &str) -> Result<AlignChoice> {
    match value {
        "official" => Ok(AlignChoice::Official),
        "strict" => Ok(AlignChoice::Strict),
        other => bail!("align must be official or strict (got '{other}')"),
    }
}

fn parse_unit(value: &str, key: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .with_context(|| format!("{key} must be a number"))?;
    if !(0.0..=1.0).contains(&v) {
        bail!("{key} must lie in [0, 1] (got {v})");
    }
    Ok(v)
}

fn parse_nonneg(value: &str, key: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .with_context(|| format!("{key} must be a number"))?;
    if v < 0.0 {
        bail!("{key} must be nonnegative (got {v})");
    }
    Ok(v)
}
