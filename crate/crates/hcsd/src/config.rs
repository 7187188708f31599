use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use hcs_checker::{ServiceProbeConfig, Thresholds};
use hcs_core::topology::TopologyFile;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    /// serde_json errors render with line and column.
    #[error("invalid config JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HcsdConfig {
    #[serde(default = "default_listen")]
    pub listen: String,
    /// Topology declared inline...
    #[serde(default)]
    pub topology: Option<TopologyFile>,
    /// ...or loaded from a separate file. Inline wins when both are set.
    #[serde(default)]
    pub topology_path: Option<PathBuf>,
    #[serde(default)]
    pub store: StoreSection,
    #[serde(default)]
    pub checker: CheckerSection,
    #[serde(default)]
    pub presenter: PresenterSection,
}

fn default_listen() -> String {
    "127.0.0.1:8080".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct StoreSection {
    pub series_capacity: usize,
    pub event_capacity: usize,
    pub journal_dir: Option<PathBuf>,
}

impl Default for StoreSection {
    fn default() -> Self {
        StoreSection {
            series_capacity: 4096,
            event_capacity: 4096,
            journal_dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckerSection {
    pub interval_ms: u64,
    pub thresholds: Thresholds,
    /// Per-service service-checker probes (DB statement, REST path).
    pub service_probes: BTreeMap<String, ServiceProbeConfig>,
}

impl Default for CheckerSection {
    fn default() -> Self {
        CheckerSection {
            interval_ms: 5_000,
            thresholds: Thresholds::default(),
            service_probes: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PresenterSection {
    /// Developer-channel webhook for critical issues.
    pub webhook_url: Option<String>,
    /// Remote address that records every cycle's diagnosis.
    pub reporter_url: Option<String>,
    pub report_dir: Option<PathBuf>,
    pub suppress_ms: i64,
}

impl Default for PresenterSection {
    fn default() -> Self {
        PresenterSection {
            webhook_url: None,
            reporter_url: None,
            report_dir: None,
            suppress_ms: hcs_presenter::DEFAULT_SUPPRESS_MS,
        }
    }
}

impl HcsdConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let config: HcsdConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.checker.interval_ms == 0 {
            return Err(ConfigError::Invalid("checker.interval_ms must be > 0".into()));
        }
        self.checker
            .thresholds
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.presenter.suppress_ms <= 0 {
            return Err(ConfigError::Invalid("presenter.suppress_ms must be > 0".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let config: HcsdConfig = serde_json::from_str(
            r#"{"topology": {"services": [], "requires": []}}"#,
        )
        .unwrap();
        config.validate().unwrap();
        assert_eq!(config.listen, "127.0.0.1:8080");
        assert_eq!(config.checker.interval_ms, 5_000);
        assert_eq!(config.store.series_capacity, 4096);
    }

    #[test]
    fn threshold_overrides_nest_under_checker() {
        let config: HcsdConfig = serde_json::from_str(
            r#"{"checker": {"thresholds": {"swap_warn_pct": 60.0}, "interval_ms": 1000}}"#,
        )
        .unwrap();
        assert_eq!(config.checker.thresholds.swap_warn_pct, 60.0);
        assert_eq!(config.checker.interval_ms, 1_000);
    }

    #[test]
    fn bad_thresholds_rejected() {
        let config: HcsdConfig = serde_json::from_str(
            r#"{"checker": {"thresholds": {"swap_warn_pct": 100.0}}}"#,
        )
        .unwrap();
        assert!(config.validate().is_err());
    }
}
