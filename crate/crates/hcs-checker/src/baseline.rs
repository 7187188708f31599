//! Latency baselines: an EWMA stands in for each probe's expected speed.
//!
//! An observation is delayed when it exceeds
//! `max(latency_factor * baseline, baseline + latency_margin_ms)` — the
//! ratio term alone over-fires at sub-millisecond baselines and the margin
//! alone under-fires at large ones. Delayed observations are excluded from
//! the baseline update so a slowdown cannot poison its own detector.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::thresholds::Thresholds;

pub const EWMA_ALPHA: f64 = 0.2;
pub const WARMUP_OBSERVATIONS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("observation must be finite")]
    NonFiniteObservation,
    #[error("observation must be non-negative")]
    NegativeObservation,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LatencyBaseline {
    pub ewma_ms: f64,
    pub warmup_count: u32,
}

impl LatencyBaseline {
    pub fn is_warm(&self) -> bool {
        self.warmup_count >= WARMUP_OBSERVATIONS
    }
}

/// Fold one observation into the baseline: the first observation seeds the
/// EWMA, later ones move it by `alpha`.
pub fn ewma_update(
    baseline: &LatencyBaseline,
    observation_ms: f64,
    alpha: f64,
) -> Result<LatencyBaseline, BaselineError> {
    if !observation_ms.is_finite() {
        return Err(BaselineError::NonFiniteObservation);
    }
    if observation_ms < 0.0 {
        return Err(BaselineError::NegativeObservation);
    }
    let ewma_ms = if baseline.warmup_count == 0 {
        observation_ms
    } else {
        alpha * observation_ms + (1.0 - alpha) * baseline.ewma_ms
    };
    Ok(LatencyBaseline {
        ewma_ms,
        warmup_count: baseline.warmup_count.saturating_add(1),
    })
}

/// Verdict for one observation against one baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayCheck {
    pub observation_ms: f64,
    pub baseline_ms: f64,
    pub delayed: bool,
}

impl DelayCheck {
    pub fn ratio(&self) -> f64 {
        self.observation_ms / self.baseline_ms.max(f64::EPSILON)
    }
}

/// Compare an observation against its baseline and fold it in afterwards.
///
/// During warmup the baseline only learns and no verdict is produced. A
/// configured `expected_ms` replaces the learned EWMA entirely (no warmup
/// gate). Delayed observations never update the EWMA.
pub fn observe_latency(
    baseline: &mut LatencyBaseline,
    observation_ms: f64,
    expected_ms: Option<f64>,
    thresholds: &Thresholds,
) -> Option<DelayCheck> {
    if !observation_ms.is_finite() || observation_ms < 0.0 {
        return None;
    }

    let reference = match expected_ms {
        Some(expected) => Some(expected),
        None if baseline.is_warm() => Some(baseline.ewma_ms),
        None => None,
    };

    let check = reference.map(|baseline_ms| {
        let limit = (thresholds.latency_factor * baseline_ms)
            .max(baseline_ms + thresholds.latency_margin_ms);
        DelayCheck {
            observation_ms,
            baseline_ms,
            delayed: observation_ms > limit,
        }
    });

    let delayed = check.map(|c| c.delayed).unwrap_or(false);
    if !delayed {
        if let Ok(updated) = ewma_update(baseline, observation_ms, EWMA_ALPHA) {
            *baseline = updated;
        }
    }
    check
}

/// Components measured per service, in tie-break priority order.
pub const DELAY_COMPONENTS: [&str; 3] = ["db_query", "rest_rtt", "network_rtt"];

/// Pick the dominant delay area: the delayed component with the largest
/// observation/baseline ratio, ties resolved by the fixed priority
/// db_query > rest_rtt > network_rtt. None when nothing is delayed.
pub fn classify_delay_area<'a, I>(checks: I) -> Option<&'static str>
where
    I: IntoIterator<Item = (&'a str, DelayCheck)>,
{
    let mut best: Option<(&'static str, f64, usize)> = None;
    for (component, check) in checks {
        if !check.delayed {
            continue;
        }
        let Some(rank) = DELAY_COMPONENTS.iter().position(|c| *c == component) else {
            continue;
        };
        let name = DELAY_COMPONENTS[rank];
        let ratio = check.ratio();
        let better = match best {
            None => true,
            // Lower rank wins ties: db_query(0) beats rest_rtt(1).
            Some((_, best_ratio, best_rank)) => {
                ratio > best_ratio || (ratio == best_ratio && rank < best_rank)
            }
        };
        if better {
            best = Some((name, ratio, rank));
        }
    }
    best.map(|(name, _, _)| name)
}
