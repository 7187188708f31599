//! The receiving end of the N:1 collector: validates incoming batches,
//! retains samples in bounded per-series ring buffers, keeps a bounded
//! event log, and appends everything to a JSONL journal for offline replay.
//!
//! One store instance is shared between the ingestion endpoint (writers)
//! and the checkers (readers); all access goes through an internal RwLock,
//! so readers see consistent point-in-time snapshots.

mod journal;
mod series;

pub use journal::{replay_journal, JournalWriter};
pub use series::{IngestOutcome, SeriesStore, StoreConfig, StoreError, StoreWarning};
