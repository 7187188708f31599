use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Proc,
    Synthetic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Service id stamped on every sample this agent emits.
    pub source_id: String,
    /// Base URL of the receiver, e.g. `http://127.0.0.1:8080`.
    pub receiver_url: String,
    #[serde(default = "default_interval_ms")]
    pub interval_ms: u64,
    #[serde(default = "default_provider")]
    pub provider: ProviderKind,
    /// Timeline file for the synthetic provider.
    #[serde(default)]
    pub synthetic_script: Option<PathBuf>,
    /// Kernel log file to follow for OOMK lines (proc provider).
    #[serde(default)]
    pub kmsg_path: Option<PathBuf>,
    /// Path whose filesystem is measured for disk usage.
    #[serde(default = "default_disk_path")]
    pub disk_path: PathBuf,
    #[serde(default = "default_buffer_capacity")]
    pub buffer_capacity: usize,
}

fn default_interval_ms() -> u64 {
    5_000
}

fn default_provider() -> ProviderKind {
    ProviderKind::Proc
}

fn default_disk_path() -> PathBuf {
    PathBuf::from("/")
}

fn default_buffer_capacity() -> usize {
    crate::sender::DEFAULT_BUFFER_CAPACITY
}

impl AgentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let config: AgentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        hcs_core::validate_service_id(&self.source_id)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.interval_ms == 0 {
            return Err(ConfigError::Invalid("interval_ms must be > 0".into()));
        }
        if self.provider == ProviderKind::Synthetic && self.synthetic_script.is_none() {
            return Err(ConfigError::Invalid(
                "synthetic provider requires synthetic_script".into(),
            ));
        }
        Ok(())
    }
}
