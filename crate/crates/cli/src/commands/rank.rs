//! `rank`: order candidate one-step trees per question and report P@1 and
//! NDCG against the gold validity labels.

use super::common::{build_judge, search_config, write_lines};
use crate::manifest::RunManifest;
use crate::settings::Settings;
use crate::CliError;
use entail_core::controller::lexical::LexicalBackend;
use entail_core::dataio::load_candidates;
use entail_core::evaluation::rank_metrics;
use entail_core::fact::FactId;
use entail_core::search::rank_one_step_candidates;
use serde_json::json;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

pub fn run(settings: &Settings, candidates: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("rank", settings.seed, settings.as_pairs());
    manifest.add_input(candidates).map_err(CliError::Input)?;

    let file = load_candidates(candidates).map_err(|e| CliError::Input(e.into()))?;
    if !file.filtered_out.is_empty() {
        eprintln!(
            "note: {} question(s) without a valid candidate were filtered: {}",
            file.filtered_out.len(),
            file.filtered_out.join(", ")
        );
    }

    let judge = build_judge(settings);
    let backend = LexicalBackend::new(judge);
    let config = search_config(settings);

    let mut rows = Vec::new();
    let mut p_sum = 0.0;
    let mut ndcg_sum = 0.0;
    for set in &file.sets {
        let pairs: Vec<(FactId, FactId)> =
            set.candidates.iter().map(|c| c.premises.clone()).collect();
        let labels: BTreeMap<(FactId, FactId), bool> = set
            .candidates
            .iter()
            .map(|c| (normalize(&c.premises), c.label))
            .collect();
        let ranked = rank_one_step_candidates(&set.hypothesis, &set.facts, &pairs, &config, &backend);
        let ordered_labels: Vec<bool> = ranked
            .iter()
            .map(|r| labels.get(&normalize(&r.premises)).copied().unwrap_or(false))
            .collect();
        let (p_at_1, ndcg) =
            rank_metrics(&ordered_labels).map_err(|e| CliError::Internal(e.into()))?;
        p_sum += p_at_1;
        ndcg_sum += ndcg;
        rows.push(json!({
            "id": set.id,
            "p_at_1": p_at_1,
            "ndcg": ndcg,
            "ranking": ranked
                .iter()
                .map(|r| json!({
                    "premises": [r.premises.0.to_string(), r.premises.1.to_string()],
                    "score": r.score,
                }))
                .collect::<Vec<_>>(),
        }));
    }

    let n = file.sets.len().max(1) as f64;
    let report = json!({
        "questions": file.sets.len(),
        "filtered_out": file.filtered_out,
        "p_at_1": p_sum / n,
        "ndcg": ndcg_sum / n,
        "per_question": rows,
    });
    println!(
        "ranked {} question(s): P@1 {:.4}, NDCG {:.4}",
        file.sets.len(),
        p_sum / n,
        ndcg_sum / n
    );
    write_lines(out, &[serde_json::to_string_pretty(&report).unwrap()])?;

    manifest.timing_ms = started.elapsed().as_millis();
    manifest.emit(out).map_err(CliError::Internal)?;
    Ok(())
}

fn normalize(premises: &(FactId, FactId)) -> (FactId, FactId) {
    if premises.0 <= premises.1 {
        premises.clone()
    } else {
        (premises.1.clone(), premises.0.clone())
    }
}
