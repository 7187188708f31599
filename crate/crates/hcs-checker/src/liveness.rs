//! Liveness windows: the recent probe history that discretizes
//! connectivity into Healthy/Degraded/Down/Unknown.

use std::collections::VecDeque;

use hcs_core::HealthStatus;

use crate::probe::ProbeOutcome;
use crate::thresholds::Thresholds;

pub const WINDOW_SIZE: usize = 5;

/// Ring of the last `WINDOW_SIZE` probe outcomes, oldest first.
#[derive(Debug, Clone, Default)]
pub struct LivenessWindow {
    outcomes: VecDeque<ProbeOutcome>,
}

impl LivenessWindow {
    pub fn push(&mut self, outcome: ProbeOutcome) {
        self.outcomes.push_back(outcome);
        while self.outcomes.len() > WINDOW_SIZE {
            self.outcomes.pop_front();
        }
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn newest(&self) -> Option<&ProbeOutcome> {
        self.outcomes.back()
    }

    fn newest_failures(&self, count: usize) -> bool {
        self.outcomes.len() >= count
            && self.outcomes.iter().rev().take(count).all(|o| !o.is_ok())
    }

    fn failure_count(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.is_ok()).count()
    }
}

/// Discretize a window: Down after `down_after` straight failures,
/// Degraded when the newest probes fail or at least two of the last five
/// did, Unknown with no history yet, Healthy otherwise.
pub fn liveness_status(window: &LivenessWindow, thresholds: &Thresholds) -> HealthStatus {
    if window.is_empty() {
        return HealthStatus::Unknown;
    }
    if window.newest_failures(thresholds.down_after as usize) {
        return HealthStatus::Down;
    }
    if window.newest_failures(thresholds.degraded_after as usize) || window.failure_count() >= 2 {
        return HealthStatus::Degraded;
    }
    HealthStatus::Healthy
}

#[cfg(test)]
mod tests {
    use super::*;

    const OK: ProbeOutcome = ProbeOutcome::Ok { rtt_ms: 1.0 };
    const TIMEOUT: ProbeOutcome = ProbeOutcome::Timeout;
    const REFUSED: ProbeOutcome = ProbeOutcome::Refused;

    fn window(outcomes: &[ProbeOutcome]) -> LivenessWindow {
        let mut w = LivenessWindow::default();
        for o in outcomes {
            w.push(*o);
        }
        w
    }

    fn status(outcomes: &[ProbeOutcome]) -> HealthStatus {
        liveness_status(&window(outcomes), &Thresholds::default())
    }

    #[test]
    fn all_ok_is_healthy() {
        assert_eq!(status(&[OK, OK, OK, OK, OK]), HealthStatus::Healthy);
    }

    #[test]
    fn three_straight_failures_is_down() {
        assert_eq!(status(&[OK, OK, TIMEOUT, TIMEOUT, TIMEOUT]), HealthStatus::Down);
        assert_eq!(status(&[REFUSED, REFUSED, REFUSED]), HealthStatus::Down);
    }

    #[test]
    fn empty_window_is_unknown() {
        assert_eq!(status(&[]), HealthStatus::Unknown);
    }

    #[test]
    fn rule_table_by_hand() {
        // Hand-enumerated window states against the written rule.
        assert_eq!(status(&[TIMEOUT]), HealthStatus::Degraded);
        assert_eq!(status(&[TIMEOUT, TIMEOUT]), HealthStatus::Degraded);
        assert_eq!(status(&[OK, OK, OK, OK, REFUSED]), HealthStatus::Degraded);
        assert_eq!(status(&[TIMEOUT, OK, OK, OK, OK]), HealthStatus::Healthy);
        assert_eq!(status(&[TIMEOUT, OK, TIMEOUT, OK, OK]), HealthStatus::Degraded);
        assert_eq!(status(&[TIMEOUT, TIMEOUT, OK, OK, OK]), HealthStatus::Degraded);
        // Recovery: newest three include an ok, so not Down.
        assert_eq!(status(&[TIMEOUT, TIMEOUT, TIMEOUT, OK, TIMEOUT]), HealthStatus::Degraded);
    }

    #[test]
    fn window_is_bounded_at_five() {
        let mut w = window(&[TIMEOUT, TIMEOUT, TIMEOUT, TIMEOUT, TIMEOUT]);
        for _ in 0..5 {
            w.push(OK);
        }
        assert_eq!(liveness_status(&w, &Thresholds::default()), HealthStatus::Healthy);
    }
}
