use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("invalid thresholds: {0}")]
pub struct InvalidThresholds(String);

/// All tunable limits for the three checkers. Defaults are the shipped
/// values; deployments override them under the `checker.thresholds` config
/// key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub cpu_warn_pct: f64,
    /// Consecutive cycles cpu must stay above cpu_warn_pct before warning.
    pub cpu_sustained_cycles: u32,
    pub mem_warn_pct: f64,
    pub swap_warn_pct: f64,
    pub swap_crit_pct: f64,
    pub disk_warn_pct: f64,
    /// A latency observation is delayed when it exceeds
    /// `max(latency_factor * baseline, baseline + latency_margin_ms)`.
    pub latency_factor: f64,
    pub latency_margin_ms: f64,
    pub probe_timeout_ms: u64,
    /// Consecutive failed probes before a service is Down.
    pub down_after: u32,
    /// Consecutive failed probes before a service is Degraded.
    pub degraded_after: u32,
    /// Samples older than this have gone stale and drive status Unknown.
    pub staleness_ms: i64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            cpu_warn_pct: 95.0,
            cpu_sustained_cycles: 3,
            mem_warn_pct: 90.0,
            swap_warn_pct: 80.0,
            swap_crit_pct: 100.0,
            disk_warn_pct: 90.0,
            latency_factor: 2.0,
            latency_margin_ms: 50.0,
            probe_timeout_ms: 2_000,
            down_after: 3,
            degraded_after: 1,
            staleness_ms: 30_000,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), InvalidThresholds> {
        if self.swap_warn_pct >= self.swap_crit_pct {
            return Err(InvalidThresholds(format!(
                "swap_warn_pct {} must be below swap_crit_pct {}",
                self.swap_warn_pct, self.swap_crit_pct
            )));
        }
        let positive = [
            ("cpu_warn_pct", self.cpu_warn_pct),
            ("mem_warn_pct", self.mem_warn_pct),
            ("swap_warn_pct", self.swap_warn_pct),
            ("swap_crit_pct", self.swap_crit_pct),
            ("disk_warn_pct", self.disk_warn_pct),
            ("latency_factor", self.latency_factor),
            ("latency_margin_ms", self.latency_margin_ms),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(InvalidThresholds(format!("{name} must be positive")));
            }
        }
        if self.probe_timeout_ms == 0
            || self.down_after == 0
            || self.degraded_after == 0
            || self.cpu_sustained_cycles == 0
            || self.staleness_ms <= 0
        {
            return Err(InvalidThresholds(
                "timeouts, cycle counts and staleness must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Thresholds::default().validate().unwrap();
    }

    #[test]
    fn warn_must_stay_below_crit() {
        let t = Thresholds { swap_warn_pct: 100.0, ..Default::default() };
        assert!(t.validate().is_err());
    }

    #[test]
    fn partial_config_overrides_one_field() {
        let t: Thresholds = serde_json::from_str(r#"{"swap_warn_pct": 70.0}"#).unwrap();
        assert_eq!(t.swap_warn_pct, 70.0);
        assert_eq!(t.swap_crit_pct, 100.0);
    }
}
