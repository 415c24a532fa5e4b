//! `generate`: search every instance and write one predicted tree per line.

use super::common::{build_judge, build_modules, search_config, task_of, write_lines};
use crate::manifest::RunManifest;
use crate::pool::run_ordered;
use crate::settings::{ModeChoice, Settings};
use crate::CliError;
use entail_core::controller::lexical::LexicalBackend;
use entail_core::dataio::{apply_retrieval, load_dataset, load_retrieval, ProblemInstance};
use entail_core::entailment::ModuleError;
use entail_core::linear::serialize_tree;
use entail_core::search::{heuristic_reason, reason, SearchError};
use serde_json::json;
use std::path::Path;
use std::time::Instant;

struct InstanceOutcome {
    prediction: String,
    trace: String,
    error_kind: Option<ErrorKind>,
}

#[derive(Clone, Copy, PartialEq)]
enum ErrorKind {
    Backend,
    Search,
}

pub fn run(
    settings: &Settings,
    data: &Path,
    retrieval: Option<&Path>,
    out: Option<&Path>,
    trace_out: Option<&Path>,
) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("generate", settings.seed, settings.as_pairs());
    manifest.add_input(data).map_err(CliError::Input)?;

    let mut instances =
        load_dataset(data, task_of(settings)).map_err(|e| CliError::Input(e.into()))?;
    if let Some(path) = retrieval {
        manifest.add_input(path).map_err(CliError::Input)?;
        let retrieved = load_retrieval(path).map_err(|e| CliError::Input(e.into()))?;
        apply_retrieval(&mut instances, &retrieved);
    }

    let modules = build_modules(settings);
    let judge = build_judge(settings);
    let backend = LexicalBackend::new(judge);
    let config = search_config(settings);

    let outcomes = run_ordered(&instances, settings.jobs, |inst: &ProblemInstance| {
        let result = match settings.mode {
            ModeChoice::Controller => reason(
                &inst.hypothesis,
                &inst.facts,
                &config,
                &modules,
                &backend,
                &judge,
            ),
            ModeChoice::Heuristic => {
                heuristic_reason(&inst.hypothesis, &inst.facts, &config, &modules, &judge)
            }
        };
        match result {
            Ok((result, trace)) => InstanceOutcome {
                prediction: json!({
                    "id": inst.id,
                    "proof": serialize_tree(&result.best_tree),
                    "proved": result.proved,
                    "iterations": result.iterations,
                })
                .to_string(),
                trace: json!({ "id": inst.id, "trace": trace }).to_string(),
                error_kind: None,
            },
            Err(err) => {
                let kind = match &err {
                    SearchError::Module(
                        ModuleError::Transport(_)
                        | ModuleError::BackendRefused { .. }
                        | ModuleError::Protocol(_),
                    ) => ErrorKind::Backend,
                    _ => ErrorKind::Search,
                };
                InstanceOutcome {
                    prediction: json!({ "id": inst.id, "error": err.to_string() }).to_string(),
                    trace: json!({ "id": inst.id, "error": err.to_string() }).to_string(),
                    error_kind: Some(kind),
                }
            }
        }
    });

    let predictions: Vec<String> = outcomes.iter().map(|o| o.prediction.clone()).collect();
    write_lines(out, &predictions)?;
    if let Some(path) = trace_out {
        let traces: Vec<String> = outcomes.iter().map(|o| o.trace.clone()).collect();
        write_lines(Some(path), &traces)?;
    }

    manifest.timing_ms = started.elapsed().as_millis();
    manifest.emit(out).map_err(CliError::Internal)?;

    let backend_failures = outcomes
        .iter()
        .filter(|o| o.error_kind == Some(ErrorKind::Backend))
        .count();
    let search_failures = outcomes
        .iter()
        .filter(|o| o.error_kind == Some(ErrorKind::Search))
        .count();
    if backend_failures > 0 {
        return Err(CliError::Backend(anyhow::anyhow!(
            "{backend_failures} instance(s) failed on the module backend (partial results kept)"
        )));
    }
    if search_failures > 0 {
        return Err(CliError::Internal(anyhow::anyhow!(
            "{search_failures} instance(s) produced no tree (partial results kept)"
        )));
    }
    Ok(())
}
