//! `losses`: compute ranking-loss values for scored batches.
//!
//! Input: one JSON object per line with any of `step_pairs` (positive,
//! negative probability pairs), `fact_pairs` (shallower, deeper score
//! pairs), `distractor_scores`, and `state_pos`/`state_neg`. Margins come
//! from the run settings.

use super::common::write_lines;
use crate::manifest::RunManifest;
use crate::settings::Settings;
use crate::CliError;
use entail_core::controller::loss::{
    fact_loss, state_rank_loss, step_rank_loss, total_loss, TreeLosses,
};
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;

pub fn run(settings: &Settings, data: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("losses", settings.seed, settings.as_pairs());
    manifest.add_input(data).map_err(CliError::Input)?;

    let text = std::fs::read_to_string(data).map_err(|e| CliError::Input(e.into()))?;
    let mut per_tree = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: Value = serde_json::from_str(line)
            .map_err(|e| CliError::Input(anyhow::anyhow!("line {}: {}", lineno + 1, e)))?;
        let step_pairs = pairs(&record, "step_pairs", lineno)?;
        let fact_pairs = pairs(&record, "fact_pairs", lineno)?;
        let distractors = floats(&record, "distractor_scores", lineno)?;

        let step = step_rank_loss(&step_pairs, settings.margin_step);
        let fact = fact_loss(&fact_pairs, &distractors, settings.margin_fact)
            .map_err(|e| CliError::Input(anyhow::anyhow!("line {}: {}", lineno + 1, e)))?;
        let state = match (
            record.get("state_pos").and_then(Value::as_f64),
            record.get("state_neg").and_then(Value::as_f64),
        ) {
            (Some(pos), Some(neg)) => state_rank_loss(pos, neg, settings.margin_state),
            _ => 0.0,
        };
        let losses = TreeLosses { step, fact, state };
        rows.push(
            json!({
                "line": lineno + 1,
                "step": losses.step,
                "fact": losses.fact,
                "state": losses.state,
                "sum": losses.sum(),
            })
            .to_string(),
        );
        per_tree.push(losses);
    }

    let total = total_loss(&per_tree);
    rows.push(json!({ "total": total, "trees": per_tree.len() }).to_string());
    write_lines(out, &rows)?;

    manifest.timing_ms = started.elapsed().as_millis();
    manifest.emit(out).map_err(CliError::Internal)?;
    Ok(())
}

fn pairs(record: &Value, key: &str, lineno: usize) -> Result<Vec<(f64, f64)>, CliError> {
    let Some(values) = record.get(key) else {
        return Ok(Vec::new());
    };
    values
        .as_array()
        .ok_or_else(|| CliError::Input(anyhow::anyhow!("line {}: {key} must be an array", lineno + 1)))?
        .iter()
        .map(|v| {
            let pair = v.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                CliError::Input(anyhow::anyhow!(
                    "line {}: each {key} entry must be a [pos, neg] pair",
                    lineno + 1
                ))
            })?;
            match (pair[0].as_f64(), pair[1].as_f64()) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(CliError::Input(anyhow::anyhow!(
                    "line {}: {key} entries must be numbers",
                    lineno + 1
                ))),
            }
        })
        .collect()
}

fn floats(record: &Value, key: &str, lineno: usize) -> Result<Vec<f64>, CliError> {
    let Some(values) = record.get(key) else {
        return Ok(Vec::new());
    };
    values
        .as_array()
        .ok_or_else(|| CliError::Input(anyhow::anyhow!("line {}: {key} must be an array", lineno + 1)))?
        .iter()
        .map(|v| {
            v.as_f64().ok_or_else(|| {
                CliError::Input(anyhow::anyhow!(
                    "line {}: {key} entries must be numbers",
                    lineno + 1
                ))
            })
        })
        .collect()
}
