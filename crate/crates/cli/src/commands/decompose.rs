//! `decompose`: emit the reasoning states of each gold tree, one per line.

use super::common::{task_of, write_lines};
use crate::manifest::RunManifest;
use crate::settings::Settings;
use crate::CliError;
use entail_core::dataio::load_dataset;
use entail_core::state::decompose_to_states;
use serde_json::json;
use std::path::Path;
use std::time::Instant;

pub fn run(settings: &Settings, data: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("decompose", settings.seed, settings.as_pairs());
    manifest.add_input(data).map_err(CliError::Input)?;

    let instances =
        load_dataset(data, task_of(settings)).map_err(|e| CliError::Input(e.into()))?;
    let mut lines = Vec::new();
    for inst in &instances {
        let gold = inst.gold.as_ref().expect("datasets carry gold trees");
        let gold_ids = gold.leaf_ids();
        let distractors: Vec<_> = inst
            .facts
            .iter()
            .filter(|f| !gold_ids.contains(f.id()))
            .cloned()
            .collect();
        let states =
            decompose_to_states(gold, &distractors).map_err(|e| CliError::Internal(e.into()))?;
        for (index, state) in states.iter().enumerate() {
            let kind = if state.target().id() == gold.root_id() {
                "forward"
            } else {
                "abductive"
            };
            lines.push(
                json!({
                    "id": inst.id,
                    "state": index,
                    "kind": kind,
                    "target": state.target().id().to_string(),
                    "target_text": state.target().text(),
                    "facts": state
                        .fact_ids()
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>(),
                })
                .to_string(),
            );
        }
    }
    write_lines(out, &lines)?;

    manifest.timing_ms = started.elapsed().as_millis();
    manifest.emit(out).map_err(CliError::Internal)?;
    Ok(())
}
