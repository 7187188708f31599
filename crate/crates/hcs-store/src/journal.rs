//! JSONL journal: one wire-schema record (sample or event object) per line.
//!
//! Files are named `samples-YYYYMMDD.jsonl` after the UTC arrival date and
//! rotate at UTC midnight. The journal is best-effort: a write failure marks
//! the writer degraded and ingestion continues in-memory-only.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use hcs_core::wire::{WireEvent, WireSample};
use hcs_core::{Event, MetricSample};

pub struct JournalWriter {
    dir: PathBuf,
    current: Option<(String, BufWriter<File>)>,
    degraded: bool,
}

impl JournalWriter {
    pub fn new(dir: PathBuf) -> Self {
        JournalWriter {
            dir,
            current: None,
            degraded: false,
        }
    }

    pub fn is_degraded(&self) -> bool {
        self.degraded
    }

    /// Append one line per record. Returns Err exactly once, on the write
    /// failure that degrades the journal; later calls are silent no-ops.
    pub fn append(
        &mut self,
        samples: &[MetricSample],
        events: &[Event],
        arrival_ms: i64,
    ) -> std::io::Result<()> {
        if self.degraded {
            return Ok(());
        }
        match self.try_append(samples, events, arrival_ms) {
            Ok(()) => Ok(()),
            Err(err) => {
                self.degraded = true;
                self.current = None;
                Err(err)
            }
        }
    }

    fn try_append(
        &mut self,
        samples: &[MetricSample],
        events: &[Event],
        arrival_ms: i64,
    ) -> std::io::Result<()> {
        let day = utc_day(arrival_ms);
        let rotate = match &self.current {
            Some((current_day, _)) => *current_day != day,
            None => true,
        };
        if rotate {
            std::fs::create_dir_all(&self.dir)?;
            let path = self.dir.join(format!("samples-{day}.jsonl"));
            let file = OpenOptions::new().create(true).append(true).open(path)?;
            self.current = Some((day, BufWriter::new(file)));
        }
        let (_, writer) = self.current.as_mut().expect("writer just ensured");
        for sample in samples {
            let line = serde_json::to_string(&WireSample::from(sample))?;
            writer.write_all(line.as_bytes())?;
            writer.write_all(b"\n")?;
        }
        for event in events {
            let line = serde_json::to_string(&WireEvent::from(event))?;
            writer.write_all(line.as_bytes())?;
            writer.write_all(b"\n")?;
        }
        writer.flush()
    }
}

fn utc_day(ts_ms: i64) -> String {
    let dt: DateTime<Utc> = DateTime::from_timestamp_millis(ts_ms).unwrap_or_else(Utc::now);
    dt.format("%Y%m%d").to_string()
}

/// Parsed journal contents: every line is either a sample or an event.
pub struct ReplayedRecords {
    pub samples: Vec<MetricSample>,
    pub events: Vec<Event>,
    pub bad_lines: usize,
}

/// Read a journal file back into domain records.
pub fn replay_journal(path: impl AsRef<Path>) -> std::io::Result<ReplayedRecords> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = ReplayedRecords {
        samples: Vec::new(),
        events: Vec::new(),
        bad_lines: 0,
    };
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Ok(wire) = serde_json::from_str::<WireSample>(&line) {
            if let Ok(sample) = MetricSample::try_from(wire) {
                out.samples.push(sample);
                continue;
            }
        }
        if let Ok(wire) = serde_json::from_str::<WireEvent>(&line) {
            if let Ok(event) = Event::try_from(wire) {
                out.events.push(event);
                continue;
            }
        }
        out.bad_lines += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_formatting() {
        // 2023-07-22T05:46:40Z
        assert_eq!(utc_day(1_690_004_800_000), "20230722");
        // one ms before midnight vs midnight
        assert_eq!(utc_day(1_689_983_999_999), "20230721");
        assert_eq!(utc_day(1_689_984_000_000), "20230722");
    }
}
