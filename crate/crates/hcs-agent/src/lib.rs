//! Data sender: samples system metrics from a provider, detects OOM-killer
//! events in the kernel log, and ships batches to the receiver with retry
//! buffering. One agent process per monitored host/service; N agents feed
//! one receiver.

pub mod collect;
pub mod config;
pub mod oomk;
pub mod proc_fs;
pub mod provider;
pub mod sender;

use std::time::{SystemTime, UNIX_EPOCH};

pub use collect::collect_tick;
pub use config::{AgentConfig, ProviderKind};
pub use provider::{
    MetricProvider, ProcProvider, ScriptHandle, SyntheticProvider, SyntheticScript,
};
pub use sender::{BatchTransport, HttpTransport, Sender, SenderStats};

pub fn wall_clock_ms() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as i64)
        .unwrap_or(0)
}

/// Build the provider named by the config.
pub fn build_provider(config: &AgentConfig) -> Result<Box<dyn MetricProvider>, config::ConfigError> {
    match config.provider {
        ProviderKind::Proc => Ok(Box::new(ProcProvider::new(
            config.disk_path.clone(),
            config.kmsg_path.clone(),
        ))),
        ProviderKind::Synthetic => {
            let path = config.synthetic_script.as_ref().ok_or_else(|| {
                config::ConfigError::Invalid("synthetic provider requires synthetic_script".into())
            })?;
            let script = SyntheticScript::from_file(path)
                .map_err(|e| config::ConfigError::Invalid(e.to_string()))?;
            Ok(Box::new(SyntheticProvider::new(script)))
        }
    }
}

/// The agent main loop: tick -> collect -> send, until `shutdown` fires.
///
/// The whole loop owns its provider and send buffer; there is no shared
/// mutable state.
pub async fn run_agent(
    config: AgentConfig,
    mut provider: Box<dyn MetricProvider>,
    mut shutdown: tokio::sync::watch::Receiver<bool>,
) -> Result<SenderStats, sender::TransportError> {
    let transport = HttpTransport::new(&config.receiver_url)?;
    let mut sender = Sender::new(transport, config.buffer_capacity);
    let mut ticker = tokio::time::interval(std::time::Duration::from_millis(config.interval_ms));
    ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);

    let mut reported_drops = 0u64;
    loop {
        tokio::select! {
            _ = ticker.tick() => {}
            _ = shutdown.changed() => {
                if *shutdown.borrow() {
                    return Ok(sender.stats());
                }
            }
        }

        let now_ms = wall_clock_ms();
        let (mut samples, events) = collect_tick(provider.as_mut(), &config.source_id, now_ms);

        // Surface buffer drops as a counter so data loss is observable.
        let dropped = sender.stats().dropped;
        if dropped > reported_drops {
            samples.push(hcs_core::MetricSample::counter(
                &config.source_id,
                now_ms,
                "send_buffer_dropped_total",
                dropped as f64,
                "batches",
            ));
            reported_drops = dropped;
        }

        if samples.is_empty() && events.is_empty() {
            continue;
        }
        let batch = hcs_core::wire::batch(&config.source_id, now_ms, &samples, &events);
        sender.flush_tick(batch).await;
    }
}
