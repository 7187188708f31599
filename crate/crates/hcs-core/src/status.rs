use serde::{Deserialize, Serialize};

use crate::CoreError;

/// Discretized health of a single service.
///
/// The variant order is the severity order used when merging evidence:
/// `Healthy < Unknown < Degraded < Down`. Unknown outranks Healthy because
/// absent data is not evidence of health.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HealthStatus {
    Healthy,
    Unknown,
    Degraded,
    Down,
}

impl HealthStatus {
    /// Degraded and Down both count as failing for root-cause purposes.
    pub fn is_failing(self) -> bool {
        matches!(self, HealthStatus::Degraded | HealthStatus::Down)
    }
}

impl std::fmt::Display for HealthStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            HealthStatus::Healthy => "healthy",
            HealthStatus::Unknown => "unknown",
            HealthStatus::Degraded => "degraded",
            HealthStatus::Down => "down",
        };
        f.write_str(s)
    }
}

/// Merge statuses under the severity order, worst wins.
pub fn worst_status<I>(statuses: I) -> Result<HealthStatus, CoreError>
where
    I: IntoIterator<Item = HealthStatus>,
{
    statuses.into_iter().max().ok_or(CoreError::EmptyInput)
}
