//! `synth`: write a seeded synthetic corpus in the dataset record format.

use super::common::{task_of, write_lines};
use crate::manifest::RunManifest;
use crate::settings::Settings;
use crate::CliError;
use entail_core::dataio::instance_record;
use entail_core::dataio::synth::{generate_synthetic, GeneratorConfig};
use std::path::Path;
use std::time::Instant;

pub struct Shape {
    pub n: usize,
    pub depth: (usize, usize),
    pub distractors: (usize, usize),
    pub hard: bool,
}

pub fn run(settings: &Settings, shape: Shape, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let config = GeneratorConfig {
        seed: settings.seed,
        n_instances: shape.n,
        depth_range: shape.depth,
        distractor_range: shape.distractors,
        hard_distractors: shape.hard,
        task: task_of(settings),
        ..GeneratorConfig::default()
    };
    let instances = generate_synthetic(&config).map_err(|e| CliError::Input(e.into()))?;
    let lines: Vec<String> = instances
        .iter()
        .map(|i| instance_record(i).to_string())
        .collect();
    write_lines(out, &lines)?;

    let mut manifest = RunManifest::new("synth", settings.seed, settings.as_pairs());
    manifest.timing_ms = started.elapsed().as_millis();
    manifest.emit(out).map_err(CliError::Internal)?;
    Ok(())
}
