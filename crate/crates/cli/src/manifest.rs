//! Run manifests: every output file gets a sibling JSON record of the
//! command, seed and configuration that produced it.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    /// Write `<primary output>.manifest.json`.
    pub fn write(&self, primary: &Path) -> Result<()> {
        let mut name = primary.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path = primary.with_file_name(name);
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, body + "\n")
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(())
    }
}
