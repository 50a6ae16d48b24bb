use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Written next to every output; `twolevel replay` re-runs `command`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, parameters: serde_json::Value, seed: Option<u64>, outputs: Vec<PathBuf>) -> Self {
        Self {
            command,
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

/// `out.csv` -> `out.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}
