//! The health checker: connectivity, system and service checks running on
//! a fixed cycle, turning store contents and live probes into per-service
//! statuses, issues and a root-cause Diagnosis.

pub mod baseline;
pub mod cycle;
pub mod liveness;
pub mod probe;
pub mod rules;
pub mod thresholds;

pub use baseline::{
    classify_delay_area, ewma_update, observe_latency, BaselineError, DelayCheck, LatencyBaseline,
    EWMA_ALPHA, WARMUP_OBSERVATIONS,
};
pub use cycle::{Checker, Diagnosis, ServiceProbeConfig};
pub use liveness::{liveness_status, LivenessWindow};
pub use probe::{HttpProber, ProbeOutcome, ProbeResult, Prober};
pub use rules::{check_system, GaugeReading, IssueDraft};
pub use thresholds::Thresholds;
