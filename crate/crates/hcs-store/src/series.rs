use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;
use std::sync::{Mutex, RwLock};

use thiserror::Error;

use hcs_core::wire::WireBatch;
use hcs_core::{Event, MetricSample};

use crate::journal::JournalWriter;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid range: t0 {t0} > t1 {t1}")]
    InvalidRange { t0: i64, t1: i64 },
}

#[derive(Debug, Clone)]
pub struct StoreConfig {
    /// Max points retained per (source, metric) series.
    pub series_capacity: usize,
    /// Max events retained overall.
    pub event_capacity: usize,
    /// Directory for the JSONL journal; None disables journaling.
    pub journal_dir: Option<PathBuf>,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            series_capacity: 4096,
            event_capacity: 4096,
            journal_dir: None,
        }
    }
}

/// Counts for one ingested batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestOutcome {
    pub accepted: u64,
    pub rejected: u64,
}

/// An operational problem the store wants surfaced as a warning issue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreWarning {
    pub message: String,
}

#[derive(Default)]
struct Inner {
    series: HashMap<(String, String), VecDeque<(i64, f64)>>,
    events: VecDeque<Event>,
}

/// Bounded in-memory store for samples and events.
pub struct SeriesStore {
    config: StoreConfig,
    inner: RwLock<Inner>,
    journal: Option<Mutex<JournalWriter>>,
    warnings: Mutex<Vec<StoreWarning>>,
}

impl SeriesStore {
    pub fn new(config: StoreConfig) -> Self {
        let journal = config
            .journal_dir
            .as_ref()
            .map(|dir| Mutex::new(JournalWriter::new(dir.clone())));
        SeriesStore {
            config,
            inner: RwLock::new(Inner::default()),
            journal,
            warnings: Mutex::new(Vec::new()),
        }
    }

    pub fn in_memory() -> Self {
        SeriesStore::new(StoreConfig::default())
    }

    /// Validate and ingest one wire batch.
    ///
    /// Invalid records (non-finite value, ts_ms <= 0, unknown kind or type,
    /// empty name) are counted as rejected; everything else is inserted.
    /// Exact duplicates are accepted idempotently but stored once. Accepted
    /// records are appended to the journal; journal failures degrade to
    /// in-memory-only and surface once as a warning.
    pub fn ingest(&self, batch: &WireBatch, arrival_ms: i64) -> IngestOutcome {
        let mut outcome = IngestOutcome::default();
        let mut samples = Vec::with_capacity(batch.samples.len());
        let mut events = Vec::with_capacity(batch.events.len());

        for wire in &batch.samples {
            match MetricSample::try_from(wire.clone()) {
                Ok(sample) => samples.push(sample),
                Err(_) => outcome.rejected += 1,
            }
        }
        for wire in &batch.events {
            match Event::try_from(wire.clone()) {
                Ok(event) => events.push(event),
                Err(_) => outcome.rejected += 1,
            }
        }

        {
            let mut inner = self.inner.write().expect("store lock poisoned");
            for sample in &samples {
                self.insert_sample(&mut inner, sample);
                outcome.accepted += 1;
            }
            for event in &events {
                Self::insert_event(&mut inner, event, self.config.event_capacity);
                outcome.accepted += 1;
            }
        }

        if let Some(journal) = &self.journal {
            let mut writer = journal.lock().expect("journal lock poisoned");
            if let Err(err) = writer.append(&samples, &events, arrival_ms) {
                self.push_warning_once(format!("journal disabled after write failure: {err}"));
            }
        }
        outcome
    }

    /// Insert a checker-originated sample directly (not journaled).
    pub fn record_sample(&self, sample: MetricSample) {
        if sample.validate().is_err() {
            return;
        }
        let mut inner = self.inner.write().expect("store lock poisoned");
        self.insert_sample(&mut inner, &sample);
    }

    /// Insert an event directly (not journaled); used by journal replay.
    pub fn record_event(&self, event: Event) {
        if event.validate().is_err() {
            return;
        }
        let mut inner = self.inner.write().expect("store lock poisoned");
        Self::insert_event(&mut inner, &event, self.config.event_capacity);
    }

    fn insert_sample(&self, inner: &mut Inner, sample: &MetricSample) {
        let key = (sample.source.clone(), sample.name.clone());
        let series = inner.series.entry(key).or_default();
        let point = (sample.ts_ms, sample.value);

        // Find the insertion position from the back; series stay sorted by
        // ts_ms even when retried batches arrive late.
        let pos = series.partition_point(|&(ts, _)| ts <= sample.ts_ms);
        let dup = series
            .iter()
            .take(pos)
            .rev()
            .take_while(|&&(ts, _)| ts == sample.ts_ms)
            .any(|&(_, v)| v.to_bits() == sample.value.to_bits());
        if dup {
            return;
        }
        series.insert(pos, point);
        while series.len() > self.config.series_capacity {
            series.pop_front();
        }
    }

    fn insert_event(inner: &mut Inner, event: &Event, capacity: usize) {
        if inner.events.iter().any(|e| e == event) {
            return;
        }
        inner.events.push_back(event.clone());
        while inner.events.len() > capacity {
            inner.events.pop_front();
        }
    }

    /// Retained points with t0_ms <= ts < t1_ms, ascending by ts.
    pub fn query_range(
        &self,
        source: &str,
        metric: &str,
        t0_ms: i64,
        t1_ms: i64,
    ) -> Result<Vec<(i64, f64)>, StoreError> {
        if t0_ms > t1_ms {
            return Err(StoreError::InvalidRange { t0: t0_ms, t1: t1_ms });
        }
        let inner = self.inner.read().expect("store lock poisoned");
        let Some(series) = inner.series.get(&(source.to_string(), metric.to_string())) else {
            return Ok(Vec::new());
        };
        Ok(series
            .iter()
            .filter(|&&(ts, _)| ts >= t0_ms && ts < t1_ms)
            .copied()
            .collect())
    }

    /// Newest point if it is no older than `staleness_ms` relative to `now_ms`.
    pub fn latest(
        &self,
        source: &str,
        metric: &str,
        staleness_ms: i64,
        now_ms: i64,
    ) -> Option<(i64, f64)> {
        let inner = self.inner.read().expect("store lock poisoned");
        let series = inner.series.get(&(source.to_string(), metric.to_string()))?;
        let &(ts, value) = series.back()?;
        if now_ms.saturating_sub(ts) <= staleness_ms {
            Some((ts, value))
        } else {
            None
        }
    }

    /// Events with t0_ms <= ts < t1_ms, ascending by ts (stable for equal ts).
    pub fn events_in(&self, t0_ms: i64, t1_ms: i64) -> Vec<Event> {
        let inner = self.inner.read().expect("store lock poisoned");
        let mut out: Vec<Event> = inner
            .events
            .iter()
            .filter(|e| e.ts_ms >= t0_ms && e.ts_ms < t1_ms)
            .cloned()
            .collect();
        out.sort_by_key(|e| e.ts_ms);
        out
    }

    /// Number of distinct (source, metric) series.
    pub fn series_count(&self) -> usize {
        self.inner.read().expect("store lock poisoned").series.len()
    }

    /// Total points retained across all series.
    pub fn point_count(&self) -> usize {
        let inner = self.inner.read().expect("store lock poisoned");
        inner.series.values().map(VecDeque::len).sum()
    }

    pub fn event_count(&self) -> usize {
        self.inner.read().expect("store lock poisoned").events.len()
    }

    /// Drain pending operational warnings (each reported once).
    pub fn drain_warnings(&self) -> Vec<StoreWarning> {
        std::mem::take(&mut *self.warnings.lock().expect("warning lock poisoned"))
    }

    fn push_warning_once(&self, message: String) {
        let mut warnings = self.warnings.lock().expect("warning lock poisoned");
        if warnings.iter().any(|w| w.message == message) {
            return;
        }
        tracing::warn!("{message}");
        warnings.push(StoreWarning { message });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hcs_core::wire::{self, WireSample};
    use hcs_core::EventType;

    fn gauge(source: &str, ts: i64, name: &str, value: f64) -> MetricSample {
        MetricSample::gauge(source, ts, name, value, "percent")
    }

    fn batch_of(samples: Vec<MetricSample>, events: Vec<Event>) -> WireBatch {
        wire::batch("test", 1, &samples, &events)
    }

    #[test]
    fn happy_path_accepts_all() {
        let store = SeriesStore::in_memory();
        let b = batch_of(
            vec![gauge("A", 10, "m", 1.0), gauge("A", 20, "m", 2.0), gauge("A", 30, "m", 3.0)],
            vec![],
        );
        let out = store.ingest(&b, 1);
        assert_eq!(out, IngestOutcome { accepted: 3, rejected: 0 });
    }

    #[test]
    fn nan_sample_rejected_others_kept() {
        let store = SeriesStore::in_memory();
        let mut b = batch_of(
            vec![gauge("A", 10, "m", 1.0), gauge("A", 20, "m", 2.0), gauge("A", 30, "m", 3.0)],
            vec![],
        );
        b.samples[1].value = f64::NAN;
        let out = store.ingest(&b, 1);
        assert_eq!(out, IngestOutcome { accepted: 2, rejected: 1 });
    }

    #[test]
    fn rejects_bad_records() {
        let store = SeriesStore::in_memory();
        let mut b = batch_of(vec![gauge("A", 10, "m", 1.0)], vec![]);
        b.samples.push(WireSample {
            source: "A".into(),
            ts_ms: 0,
            kind: "gauge".into(),
            name: "m".into(),
            value: 1.0,
            unit: "".into(),
            labels: Default::default(),
        });
        b.samples.push(WireSample {
            source: "A".into(),
            ts_ms: 5,
            kind: "histogram".into(),
            name: "m".into(),
            value: 1.0,
            unit: "".into(),
            labels: Default::default(),
        });
        b.samples.push(WireSample {
            source: "A".into(),
            ts_ms: 5,
            kind: "gauge".into(),
            name: "".into(),
            value: 1.0,
            unit: "".into(),
            labels: Default::default(),
        });
        let out = store.ingest(&b, 1);
        assert_eq!(out, IngestOutcome { accepted: 1, rejected: 3 });
    }

    #[test]
    fn duplicate_batch_is_idempotent() {
        let store = SeriesStore::in_memory();
        let b = batch_of(
            vec![gauge("A", 10, "m", 1.0), gauge("A", 20, "m", 2.0), gauge("A", 30, "m", 3.0)],
            vec![Event::new("A", 10, EventType::Oomk)],
        );
        let first = store.ingest(&b, 1);
        assert_eq!(first, IngestOutcome { accepted: 4, rejected: 0 });
        let second = store.ingest(&b, 2);
        assert_eq!(second, IngestOutcome { accepted: 4, rejected: 0 });
        let points = store.query_range("A", "m", 0, i64::MAX).unwrap();
        assert_eq!(points.len(), 3);
        assert_eq!(store.event_count(), 1);
    }

    #[test]
    fn query_is_half_open() {
        let store = SeriesStore::in_memory();
        store.ingest(
            &batch_of(
                vec![gauge("A", 10, "m", 1.0), gauge("A", 20, "m", 2.0), gauge("A", 30, "m", 3.0)],
                vec![],
            ),
            1,
        );
        let points = store.query_range("A", "m", 10, 30).unwrap();
        assert_eq!(points, vec![(10, 1.0), (20, 2.0)]);
    }

    #[test]
    fn unknown_series_is_empty() {
        let store = SeriesStore::in_memory();
        assert!(store.query_range("A", "nope", 0, 100).unwrap().is_empty());
    }

    #[test]
    fn invalid_range_is_an_error() {
        let store = SeriesStore::in_memory();
        assert!(store.query_range("A", "m", 30, 10).is_err());
    }

    #[test]
    fn ring_keeps_newest_at_capacity() {
        let store = SeriesStore::new(StoreConfig {
            series_capacity: 4096,
            ..Default::default()
        });
        for chunk_start in (1..=5000).step_by(500) {
            let samples: Vec<MetricSample> = (chunk_start..chunk_start + 500)
                .map(|ts| gauge("A", ts as i64, "m", ts as f64))
                .collect();
            store.ingest(&batch_of(samples, vec![]), 1);
        }
        let points = store.query_range("A", "m", 0, i64::MAX).unwrap();
        assert_eq!(points.len(), 4096);
        assert_eq!(points[0].0, 5000 - 4096 + 1);
        assert_eq!(points.last().unwrap().0, 5000);
    }

    #[test]
    fn out_of_order_points_stay_sorted() {
        let store = SeriesStore::in_memory();
        store.ingest(&batch_of(vec![gauge("A", 30, "m", 3.0)], vec![]), 1);
        store.ingest(&batch_of(vec![gauge("A", 10, "m", 1.0)], vec![]), 1);
        store.ingest(&batch_of(vec![gauge("A", 20, "m", 2.0)], vec![]), 1);
        let points = store.query_range("A", "m", 0, 100).unwrap();
        assert_eq!(points, vec![(10, 1.0), (20, 2.0), (30, 3.0)]);
    }

    #[test]
    fn latest_respects_staleness() {
        let store = SeriesStore::in_memory();
        store.ingest(&batch_of(vec![gauge("A", 1_000, "m", 5.0)], vec![]), 1);
        assert_eq!(store.latest("A", "m", 30_000, 4_000), Some((1_000, 5.0)));
        assert_eq!(store.latest("A", "m", 30_000, 61_000), None);
        assert_eq!(store.latest("A", "other", 30_000, 2_000), None);
    }

    #[test]
    fn memory_stays_bounded() {
        let store = SeriesStore::new(StoreConfig {
            series_capacity: 16,
            event_capacity: 8,
            journal_dir: None,
        });
        for i in 0..1000 {
            let b = batch_of(
                vec![gauge("A", i + 1, "m", i as f64), gauge("B", i + 1, "m", i as f64)],
                vec![Event::new("A", i + 1, EventType::ProbeError)],
            );
            store.ingest(&b, 1);
        }
        assert!(store.point_count() <= 2 * 16);
        assert!(store.event_count() <= 8);
    }

    #[test]
    fn events_in_window() {
        let store = SeriesStore::in_memory();
        let b = batch_of(
            vec![],
            vec![
                Event::new("A", 10, EventType::Oomk),
                Event::new("A", 20, EventType::ProbeError),
                Event::new("A", 30, EventType::Oomk),
            ],
        );
        store.ingest(&b, 1);
        let events = store.events_in(10, 30);
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].ts_ms, 10);
        assert_eq!(events[1].ts_ms, 20);
    }
}
