//! The health check daemon: receives agent batches over HTTP, runs the
//! check cycle against the declared topology, writes reports, and pushes
//! notifications. Startable in-process for tests and the simulator.

pub mod config;
pub mod daemon;
pub mod http;
pub mod report;

pub use config::{CheckerSection, HcsdConfig, PresenterSection, StoreSection};
pub use daemon::{preload_journal, start, DaemonError, DaemonHandle};

pub(crate) fn wall_clock_ms() -> i64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as i64)
        .unwrap_or(0)
}
