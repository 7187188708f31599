//! Wire schema for agent -> receiver batches.
//!
//! The top-level shape is fixed:
//!
//! ```json
//! {"sender_id":"A","sent_at_ms":1690000000000,
//!  "samples":[{"source":"A","ts_ms":1690000000000,"kind":"gauge",
//!              "name":"swap_used_pct","value":100.0,"unit":"percent","labels":{}}],
//!  "events":[{"source":"A","ts_ms":1690000000000,"type":"oomk",
//!             "payload":{"victim_pid":"1234","victim_name":"reviewd","rss_kb":"524288"}}]}
//! ```
//!
//! Wire records keep `kind` and `type` as plain strings so a batch with one
//! unknown record still parses and the receiver can count the bad record as
//! rejected instead of dropping the whole batch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Event, EventType, InvalidRecord, MetricKind, MetricSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireBatch {
    pub sender_id: String,
    pub sent_at_ms: i64,
    #[serde(default)]
    pub samples: Vec<WireSample>,
    #[serde(default)]
    pub events: Vec<WireEvent>,
}

impl WireBatch {
    pub fn record_count(&self) -> usize {
        self.samples.len() + self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty() && self.events.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireSample {
    pub source: String,
    pub ts_ms: i64,
    pub kind: String,
    pub name: String,
    pub value: f64,
    pub unit: String,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireEvent {
    pub source: String,
    pub ts_ms: i64,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub payload: BTreeMap<String, String>,
}

/// Receiver response to a batch POST.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestAck {
    pub accepted: u64,
    pub rejected: u64,
}

impl From<&MetricSample> for WireSample {
    fn from(s: &MetricSample) -> Self {
        WireSample {
            source: s.source.clone(),
            ts_ms: s.ts_ms,
            kind: match s.kind {
                MetricKind::Gauge => "gauge".to_string(),
                MetricKind::Counter => "counter".to_string(),
            },
            name: s.name.clone(),
            value: s.value,
            unit: s.unit.clone(),
            labels: s.labels.clone(),
        }
    }
}

impl TryFrom<WireSample> for MetricSample {
    type Error = InvalidRecord;

    fn try_from(w: WireSample) -> Result<Self, Self::Error> {
        let kind: MetricKind = w.kind.parse()?;
        let sample = MetricSample {
            source: w.source,
            ts_ms: w.ts_ms,
            kind,
            name: w.name,
            value: w.value,
            unit: w.unit,
            labels: w.labels,
        };
        sample.validate()?;
        Ok(sample)
    }
}

impl From<&Event> for WireEvent {
    fn from(e: &Event) -> Self {
        WireEvent {
            source: e.source.clone(),
            ts_ms: e.ts_ms,
            kind: match e.kind {
                EventType::Oomk => "oomk".to_string(),
                EventType::ServiceExit => "service_exit".to_string(),
                EventType::ProbeError => "probe_error".to_string(),
            },
            payload: e.payload.clone(),
        }
    }
}

impl TryFrom<WireEvent> for Event {
    type Error = InvalidRecord;

    fn try_from(w: WireEvent) -> Result<Self, Self::Error> {
        let kind: EventType = w.kind.parse()?;
        let event = Event {
            source: w.source,
            ts_ms: w.ts_ms,
            kind,
            payload: w.payload,
        };
        event.validate()?;
        Ok(event)
    }
}

/// Build a wire batch from domain samples and events.
pub fn batch(
    sender_id: &str,
    sent_at_ms: i64,
    samples: &[MetricSample],
    events: &[Event],
) -> WireBatch {
    WireBatch {
        sender_id: sender_id.to_string(),
        sent_at_ms,
        samples: samples.iter().map(WireSample::from).collect(),
        events: events.iter().map(WireEvent::from).collect(),
    }
}
