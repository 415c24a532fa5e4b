//! Run manifests: the resolved configuration, input digests, tool version,
//! seed, and timing for every run.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    /// Input path -> SHA-256 of the file contents.
    pub inputs: BTreeMap<String, String>,
    pub timing_ms: u128,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            inputs: BTreeMap::new(),
            timing_ms: 0,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(path.display().to_string(), hex);
        Ok(())
    }

    /// Write next to the primary output (`<out>.manifest.json`), or to
    /// stderr when results go to stdout.
    pub fn emit(&self, out: Option<&Path>) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        match out {
            Some(path) => {
                let mut manifest_path = path.as_os_str().to_owned();
                manifest_path.push(".manifest.json");
                std::fs::write(manifest_path, json)?;
            }
            None => eprintln!("{json}"),
        }
        Ok(())
    }
}
