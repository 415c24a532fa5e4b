//! `evaluate`: score predictions against gold trees and report per-instance
//! and aggregate metrics.

use super::common::{build_judge, task_of, write_lines};
use crate::manifest::RunManifest;
use crate::settings::{AlignChoice, Settings};
use crate::CliError;
use entail_core::dataio::load_dataset;
use entail_core::evaluation::{evaluate_pair, zero_report, AlignMode, MetricReport};
use entail_core::fact::FactId;
use entail_core::linear::parse_linearized_proof;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

pub fn run(
    settings: &Settings,
    pred_path: &Path,
    gold_path: &Path,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("evaluate", settings.seed, settings.as_pairs());
    manifest.add_input(pred_path).map_err(CliError::Input)?;
    manifest.add_input(gold_path).map_err(CliError::Input)?;

    let gold = load_dataset(gold_path, task_of(settings)).map_err(|e| CliError::Input(e.into()))?;
    let predictions = read_predictions(pred_path)?;
    let judge = build_judge(settings);
    let mode = match settings.align {
        AlignChoice::Official => AlignMode::Official,
        AlignChoice::Strict => AlignMode::Strict,
    };

    let mut rows = Vec::new();
    let mut missing = Vec::new();
    let mut reports = Vec::new();
    for inst in &gold {
        let gold_tree = inst.gold.as_ref().expect("datasets carry gold trees");
        let sentences: BTreeMap<FactId, String> = inst
            .facts
            .iter()
            .map(|f| (f.id().clone(), f.text().to_string()))
            .collect();
        let parsed = predictions.get(&inst.id).and_then(|proof| {
            parse_linearized_proof(proof, &sentences, inst.hypothesis.text()).ok()
        });
        let report = match parsed {
            Some(pred_tree) => evaluate_pair(
                &pred_tree,
                gold_tree,
                &judge,
                settings.judge_threshold,
                mode,
            ),
            None => {
                missing.push(inst.id.clone());
                zero_report()
            }
        };
        rows.push(json!({
            "id": inst.id,
            "leaves_f1": report.leaves_f1,
            "leaves_allcorrect": report.leaves_allcorrect as u8,
            "steps_f1": report.steps_f1,
            "steps_allcorrect": report.steps_allcorrect as u8,
            "intermediates_f1": report.intermediates_f1,
            "intermediates_allcorrect": report.intermediates_allcorrect as u8,
            "overall_allcorrect": report.overall_allcorrect as u8,
        }));
        reports.push(report);
    }

    let aggregate = aggregate(&reports);
    print_table(&aggregate, reports.len(), missing.len());

    let report_json = json!({
        "instances": rows,
        "aggregate": {
            "count": reports.len(),
            "missing_predictions": missing,
            "leaves_f1": aggregate.leaves_f1,
            "leaves_allcorrect": aggregate.leaves_allcorrect_rate,
            "steps_f1": aggregate.steps_f1,
            "steps_allcorrect": aggregate.steps_allcorrect_rate,
            "intermediates_f1": aggregate.intermediates_f1,
            "intermediates_allcorrect": aggregate.intermediates_allcorrect_rate,
            "overall_allcorrect": aggregate.overall_allcorrect_rate,
        },
        // Label vocabulary for manual step review; no tooling is provided,
        // the names are fixed here so annotations stay comparable.
        "manual_step_labels": [
            "valid",
            "unsupported",
            "repeat premises",
            "missing premises",
        ],
    });
    write_lines(out, &[serde_json::to_string_pretty(&report_json).unwrap()])?;

    manifest.timing_ms = started.elapsed().as_millis();
    manifest.emit(out).map_err(CliError::Internal)?;
    Ok(())
}

fn read_predictions(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(e.into()))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: Value = serde_json::from_str(line).map_err(|e| {
            CliError::Input(anyhow::anyhow!("prediction line {}: {}", lineno + 1, e))
        })?;
        let Some(id) = record.get("id").and_then(Value::as_str) else {
            return Err(CliError::Input(anyhow::anyhow!(
                "prediction line {} has no id",
                lineno + 1
            )));
        };
        if let Some(proof) = record.get("proof").and_then(Value::as_str) {
            out.insert(id.to_string(), proof.to_string());
        }
    }
    Ok(out)
}

pub struct Aggregate {
    pub leaves_f1: f64,
    pub leaves_allcorrect_rate: f64,
    pub steps_f1: f64,
    pub steps_allcorrect_rate: f64,
    pub intermediates_f1: f64,
    pub intermediates_allcorrect_rate: f64,
    pub overall_allcorrect_rate: f64,
}

pub fn aggregate(reports: &[MetricReport]) -> Aggregate {
    let n = reports.len().max(1) as f64;
    let mean = |f: &dyn Fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    Aggregate {
        leaves_f1: mean(&|r| r.leaves_f1),
        leaves_allcorrect_rate: mean(&|r| r.leaves_allcorrect as u8 as f64),
        steps_f1: mean(&|r| r.steps_f1),
        steps_allcorrect_rate: mean(&|r| r.steps_allcorrect as u8 as f64),
        intermediates_f1: mean(&|r| r.intermediates_f1),
        intermediates_allcorrect_rate: mean(&|r| r.intermediates_allcorrect as u8 as f64),
        overall_allcorrect_rate: mean(&|r| r.overall_allcorrect as u8 as f64),
    }
}

fn print_table(a: &Aggregate, count: usize, missing: usize) {
    println!("evaluated {count} instance(s), {missing} missing prediction(s)");
    println!("{:<16} {:>8} {:>12}", "metric", "F1", "AllCorrect");
    println!("{:<16} {:>8.3} {:>12.3}", "leaves", a.leaves_f1, a.leaves_allcorrect_rate);
    println!("{:<16} {:>8.3} {:>12.3}", "steps", a.steps_f1, a.steps_allcorrect_rate);
    println!(
        "{:<16} {:>8.3} {:>12.3}",
        "intermediates", a.intermediates_f1, a.intermediates_allcorrect_rate
    );
    println!("{:<16} {:>8} {:>12.3}", "overall", "-", a.overall_allcorrect_rate);
}
