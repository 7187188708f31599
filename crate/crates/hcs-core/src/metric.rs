use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Why a sample or event was rejected at ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidRecord {
    #[error("value is not finite")]
    NonFiniteValue,
    #[error("ts_ms must be > 0")]
    NonPositiveTimestamp,
    #[error("metric name must be non-empty")]
    EmptyName,
    #[error("unknown metric kind `{0}`")]
    UnknownKind(String),
    #[error("unknown event type `{0}`")]
    UnknownEventType(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Gauge,
    Counter,
}

impl std::str::FromStr for MetricKind {
    type Err = InvalidRecord;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gauge" => Ok(MetricKind::Gauge),
            "counter" => Ok(MetricKind::Counter),
            other => Err(InvalidRecord::UnknownKind(other.to_string())),
        }
    }
}

/// One timestamped numeric observation from a source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub source: String,
    pub ts_ms: i64,
    pub kind: MetricKind,
    pub name: String,
    pub value: f64,
    pub unit: String,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
}

impl MetricSample {
    pub fn gauge(source: &str, ts_ms: i64, name: &str, value: f64, unit: &str) -> Self {
        MetricSample {
            source: source.to_string(),
            ts_ms,
            kind: MetricKind::Gauge,
            name: name.to_string(),
            value,
            unit: unit.to_string(),
            labels: BTreeMap::new(),
        }
    }

    pub fn counter(source: &str, ts_ms: i64, name: &str, value: f64, unit: &str) -> Self {
        MetricSample {
            kind: MetricKind::Counter,
            ..MetricSample::gauge(source, ts_ms, name, value, unit)
        }
    }

    pub fn with_label(mut self, key: &str, value: &str) -> Self {
        self.labels.insert(key.to_string(), value.to_string());
        self
    }

    /// Ingestion validity: finite value, positive timestamp, non-empty name.
    pub fn validate(&self) -> Result<(), InvalidRecord> {
        if !self.value.is_finite() {
            return Err(InvalidRecord::NonFiniteValue);
        }
        if self.ts_ms <= 0 {
            return Err(InvalidRecord::NonPositiveTimestamp);
        }
        if self.name.is_empty() {
            return Err(InvalidRecord::EmptyName);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventType {
    Oomk,
    ServiceExit,
    ProbeError,
}

impl std::str::FromStr for EventType {
    type Err = InvalidRecord;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oomk" => Ok(EventType::Oomk),
            "service_exit" => Ok(EventType::ServiceExit),
            "probe_error" => Ok(EventType::ProbeError),
            other => Err(InvalidRecord::UnknownEventType(other.to_string())),
        }
    }
}

/// A discrete occurrence, e.g. an OOM-killer victim or a collection failure.
///
/// OOMK payloads carry `victim_pid`, `victim_name` and, when the kernel
/// reported it, `rss_kb`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub source: String,
    pub ts_ms: i64,
    #[serde(rename = "type")]
    pub kind: EventType,
    #[serde(default)]
    pub payload: BTreeMap<String, String>,
}

impl Event {
    pub fn new(source: &str, ts_ms: i64, kind: EventType) -> Self {
        Event {
            source: source.to_string(),
            ts_ms,
            kind,
            payload: BTreeMap::new(),
        }
    }

    pub fn with_payload(mut self, key: &str, value: impl Into<String>) -> Self {
        self.payload.insert(key.to_string(), value.into());
        self
    }

    pub fn validate(&self) -> Result<(), InvalidRecord> {
        if self.ts_ms <= 0 {
            return Err(InvalidRecord::NonPositiveTimestamp);
        }
        Ok(())
    }
}
