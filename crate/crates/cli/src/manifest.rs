use std::path::{Path, PathBuf};

use activeris_core::config::ScenarioConfig;
use activeris_core::validate::ValidationOptions;
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::output::Format;
use crate::table::SweepRequest;

/// What a run did, in enough detail to repeat it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub timestamp: String,
    pub seed: u64,
    /// The fully resolved scenario as TOML (TOML keeps infinite Rician
    /// factors, which JSON cannot).
    pub config_toml: String,
    pub job: Job,
    pub format: Format,
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Job {
    Sweep(SweepRequest),
    Validate(ValidationOptions),
}

impl RunManifest {
    pub fn new(
        command: &str,
        cfg: &ScenarioConfig,
        job: Job,
        format: Format,
        outputs: Vec<PathBuf>,
    ) -> Self {
        let seed = match &job {
            Job::Sweep(r) => r.sim.seed,
            Job::Validate(v) => v.seed,
        };
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            seed,
            config_toml: cfg.to_toml_string(),
            job,
            format,
            outputs,
        }
    }

    pub fn config(&self) -> Result<ScenarioConfig> {
        Ok(ScenarioConfig::from_toml_str(&self.config_toml)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

/// `out.csv` gets `out.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}
