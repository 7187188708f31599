//! Fault specifications and scenario scripts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FaultKind {
    /// Close the listener; probes get connection refused.
    Kill,
    /// Multiply the DB latency model mean.
    SlowDb { factor: f64 },
    /// Ramp the attached agent's swap gauge to 100% over `ramp_s`, then
    /// emit one scripted OOMK kernel line naming this service's process.
    MemExhaust { ramp_s: u32 },
    /// Make /health and /work hang past any client timeout.
    DropNet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub target: String,
    /// Scenario-relative injection time.
    pub at_ms: i64,
    pub kind: FaultKind,
}

/// A timed list of fault injections plus the stack parameters for the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioScript {
    pub duration_ms: i64,
    #[serde(default)]
    pub faults: Vec<FaultSpec>,
    #[serde(default = "default_agent_interval_ms")]
    pub agent_interval_ms: u64,
    #[serde(default = "default_check_interval_ms")]
    pub check_interval_ms: u64,
    #[serde(default = "default_poll_interval_ms")]
    pub poll_interval_ms: u64,
    /// Optional developer-channel webhook wired into the daemon.
    #[serde(default)]
    pub webhook_url: Option<String>,
    #[serde(default)]
    pub reporter_url: Option<String>,
    #[serde(default)]
    pub report_dir: Option<std::path::PathBuf>,
}

fn default_agent_interval_ms() -> u64 {
    2_000
}

fn default_check_interval_ms() -> u64 {
    5_000
}

fn default_poll_interval_ms() -> u64 {
    250
}

impl ScenarioScript {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}
