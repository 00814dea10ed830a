use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::RunConfig;
use crate::error::{CliError, CliResult};

/// Record of one run. Replaying `config` reproduces the simulate and
/// diagnose outputs byte for byte; only the timing fields differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    /// Fully resolved configuration, with frame specs inlined.
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub version: String,
    pub threads: usize,
    /// Start time in seconds since the Unix epoch.
    pub started_at: f64,
    pub elapsed_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        crate::commands::write_json(path, self)
    }
}

/// `<stem>.manifest.json` next to the primary output.
pub fn default_manifest_path(primary: &Path) -> PathBuf {
    let stem = primary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string());
    primary.with_file_name(format!("{stem}.manifest.json"))
}
