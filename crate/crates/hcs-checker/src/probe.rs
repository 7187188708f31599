//! Connectivity probes. The checker is the HTTP client; services only
//! expose a health endpoint. Every failure mode is a probe outcome, not an
//! error: probe results are data for the liveness window.

use std::time::{Duration, Instant};

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Ok { rtt_ms: f64 },
    Timeout,
    Refused,
    BadStatus { code: u16 },
}

impl ProbeOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, ProbeOutcome::Ok { .. })
    }

    pub fn rtt_ms(&self) -> Option<f64> {
        match self {
            ProbeOutcome::Ok { rtt_ms } => Some(*rtt_ms),
            _ => None,
        }
    }

    /// Short name for issue evidence payloads.
    pub fn describe(&self) -> String {
        match self {
            ProbeOutcome::Ok { rtt_ms } => format!("ok ({rtt_ms:.1} ms)"),
            ProbeOutcome::Timeout => "timeout".to_string(),
            ProbeOutcome::Refused => "refused".to_string(),
            ProbeOutcome::BadStatus { code } => format!("bad_status {code}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub target: String,
    pub sent_ms: i64,
    pub outcome: ProbeOutcome,
}

#[async_trait]
pub trait Prober: Send + Sync {
    async fn probe(&self, url: &str, timeout_ms: u64) -> ProbeOutcome;
}

/// Real HTTP prober: 2xx within the deadline is ok, connection errors are
/// refused, deadline overruns are timeouts, anything else is bad_status.
pub struct HttpProber {
    client: reqwest::Client,
}

impl HttpProber {
    pub fn new() -> Self {
        let client = reqwest::Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .build()
            .expect("probe client");
        HttpProber { client }
    }
}

impl Default for HttpProber {
    fn default() -> Self {
        HttpProber::new()
    }
}

#[async_trait]
impl Prober for HttpProber {
    async fn probe(&self, url: &str, timeout_ms: u64) -> ProbeOutcome {
        let started = Instant::now();
        let response = self
            .client
            .get(url)
            .timeout(Duration::from_millis(timeout_ms))
            .send()
            .await;
        let rtt_ms = started.elapsed().as_secs_f64() * 1000.0;
        match response {
            Ok(resp) if resp.status().is_success() => ProbeOutcome::Ok { rtt_ms },
            Ok(resp) => ProbeOutcome::BadStatus { code: resp.status().as_u16() },
            Err(err) if err.is_timeout() => ProbeOutcome::Timeout,
            Err(_) => ProbeOutcome::Refused,
        }
    }
}
