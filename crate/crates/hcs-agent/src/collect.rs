//! One collection tick: provider reading -> metric samples + events.

use hcs_core::{Event, EventType, MetricSample};

use crate::oomk::detect_oomk;
use crate::provider::MetricProvider;

/// Gauge names emitted every tick, in emission order.
pub const GAUGE_NAMES: [&str; 6] = [
    "cpu_pct",
    "mem_used_pct",
    "swap_used_pct",
    "disk_used_pct",
    "net_rx_bytes_per_s",
    "net_tx_bytes_per_s",
];

/// Collect one tick from the provider.
///
/// A provider failure produces no samples and a single probe_error event;
/// the agent never crashes on bad provider data.
pub fn collect_tick(
    provider: &mut dyn MetricProvider,
    source: &str,
    now_ms: i64,
) -> (Vec<MetricSample>, Vec<Event>) {
    let reading = match provider.read(now_ms) {
        Ok(reading) => reading,
        Err(err) => {
            let event = Event::new(source, now_ms, EventType::ProbeError)
                .with_payload("error", err.to_string());
            return (Vec::new(), vec![event]);
        }
    };

    let mut samples = Vec::with_capacity(6);
    if let Some(cpu) = reading.cpu_pct {
        samples.push(MetricSample::gauge(source, now_ms, "cpu_pct", cpu, "percent"));
    }
    samples.push(MetricSample::gauge(
        source,
        now_ms,
        "mem_used_pct",
        reading.mem_used_pct,
        "percent",
    ));
    samples.push(MetricSample::gauge(
        source,
        now_ms,
        "swap_used_pct",
        reading.swap_used_pct,
        "percent",
    ));
    samples.push(MetricSample::gauge(
        source,
        now_ms,
        "disk_used_pct",
        reading.disk_used_pct,
        "percent",
    ));
    samples.push(MetricSample::gauge(
        source,
        now_ms,
        "net_rx_bytes_per_s",
        reading.net_rx_bytes_per_s,
        "bytes_per_s",
    ));
    samples.push(MetricSample::gauge(
        source,
        now_ms,
        "net_tx_bytes_per_s",
        reading.net_tx_bytes_per_s,
        "bytes_per_s",
    ));

    let lines: Vec<&str> = reading.kernel_log_lines.iter().map(String::as_str).collect();
    let events = detect_oomk(lines, source, now_ms);
    (samples, events)
}
