//! Daemon assembly: store + checker cycle + presenter + HTTP server, all
//! startable in-process so tests and the simulator can drive a full stack.

use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use thiserror::Error;
use tokio::sync::watch;
use tokio::task::JoinHandle;

use hcs_checker::{Checker, Diagnosis, HttpProber};
use hcs_core::topology::{self, TopologyError};
use hcs_core::DependencyGraph;
use hcs_presenter::{issue_text, NotificationLedger, Outbox, OutboxItem};
use hcs_store::{replay_journal, SeriesStore, StoreConfig};

use crate::config::HcsdConfig;
use crate::http::{router, AppState};
use crate::report::{persist_report, render_cycle_report};

const OUTBOX_CAPACITY: usize = 64;

#[derive(Debug, Error)]
pub enum DaemonError {
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("config: {0}")]
    Config(String),
    #[error("cannot bind {listen}: {source}")]
    Bind {
        listen: String,
        source: std::io::Error,
    },
}

pub struct DaemonHandle {
    pub addr: SocketAddr,
    pub store: Arc<SeriesStore>,
    pub graph: Arc<DependencyGraph>,
    latest: Arc<RwLock<Option<Arc<Diagnosis>>>>,
    shutdown: watch::Sender<bool>,
    tasks: Vec<JoinHandle<()>>,
}

impl DaemonHandle {
    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn latest_diagnosis(&self) -> Option<Arc<Diagnosis>> {
        self.latest.read().expect("latest lock").clone()
    }

    pub async fn shutdown(self) {
        let _ = self.shutdown.send(true);
        for task in self.tasks {
            task.abort();
            let _ = task.await;
        }
    }
}

/// Load the journal into the store (without re-journaling). Returns
/// (samples, events, unparseable lines).
pub fn preload_journal(
    store: &SeriesStore,
    path: &Path,
) -> std::io::Result<(usize, usize, usize)> {
    let replayed = replay_journal(path)?;
    let counts = (
        replayed.samples.len(),
        replayed.events.len(),
        replayed.bad_lines,
    );
    for sample in replayed.samples {
        store.record_sample(sample);
    }
    for event in replayed.events {
        store.record_event(event);
    }
    Ok(counts)
}

/// Start the daemon. The handle exposes the bound address (useful with
/// `listen: "127.0.0.1:0"`), the shared store, and the latest diagnosis.
pub async fn start(config: HcsdConfig) -> Result<DaemonHandle, DaemonError> {
    config
        .validate()
        .map_err(|e| DaemonError::Config(e.to_string()))?;

    let graph = Arc::new(resolve_topology(&config)?);
    let store = Arc::new(SeriesStore::new(StoreConfig {
        series_capacity: config.store.series_capacity,
        event_capacity: config.store.event_capacity,
        journal_dir: config.store.journal_dir.clone(),
    }));
    let latest: Arc<RwLock<Option<Arc<Diagnosis>>>> = Arc::new(RwLock::new(None));
    let (shutdown_tx, shutdown_rx) = watch::channel(false);
    let mut tasks = Vec::new();

    // HTTP surface.
    let listener = tokio::net::TcpListener::bind(&config.listen)
        .await
        .map_err(|source| DaemonError::Bind {
            listen: config.listen.clone(),
            source,
        })?;
    let addr = listener.local_addr().map_err(|source| DaemonError::Bind {
        listen: config.listen.clone(),
        source,
    })?;
    let app = router(AppState {
        store: Arc::clone(&store),
        latest: Arc::clone(&latest),
    });
    let mut http_shutdown = shutdown_rx.clone();
    tasks.push(tokio::spawn(async move {
        let serve = axum::serve(listener, app).with_graceful_shutdown(async move {
            let _ = http_shutdown.changed().await;
        });
        if let Err(err) = serve.await {
            tracing::error!("http server: {err}");
        }
    }));

    // Notification outbox.
    let outbox = Arc::new(Outbox::new(OUTBOX_CAPACITY));
    let delivery_client = reqwest::Client::new();
    tasks.push(tokio::spawn(Arc::clone(&outbox).run_deliveries(
        delivery_client,
        shutdown_rx.clone(),
    )));

    // Check cycle scheduler.
    tasks.push(tokio::spawn(run_cycles(
        config.clone(),
        Arc::clone(&graph),
        Arc::clone(&store),
        Arc::clone(&latest),
        outbox,
        shutdown_rx,
    )));

    tracing::info!(%addr, services = graph.node_count(), "hcsd started");
    Ok(DaemonHandle {
        addr,
        store,
        graph,
        latest,
        shutdown: shutdown_tx,
        tasks,
    })
}

fn resolve_topology(config: &HcsdConfig) -> Result<DependencyGraph, DaemonError> {
    if let Some(inline) = &config.topology {
        let services = inline.services.iter().cloned().map(Into::into).collect();
        return DependencyGraph::build(services, &inline.requires)
            .map_err(|e| DaemonError::Topology(e.into()));
    }
    if let Some(path) = &config.topology_path {
        return Ok(topology::load_topology(path)?);
    }
    Err(DaemonError::Config(
        "either topology or topology_path is required".into(),
    ))
}

async fn run_cycles(
    config: HcsdConfig,
    graph: Arc<DependencyGraph>,
    store: Arc<SeriesStore>,
    latest: Arc<RwLock<Option<Arc<Diagnosis>>>>,
    outbox: Arc<Outbox>,
    mut shutdown: watch::Receiver<bool>,
) {
    let interval_ms = config.checker.interval_ms;
    let mut checker = Checker::new(
        Arc::clone(&graph),
        config.checker.thresholds,
        config.checker.service_probes.clone(),
    );
    let prober = HttpProber::new();
    let mut ledger = NotificationLedger::new();
    let mut ticker = tokio::time::interval(std::time::Duration::from_millis(interval_ms));
    ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Skip);
    let mut skipped_cycles: u64 = 0;

    loop {
        tokio::select! {
            _ = ticker.tick() => {}
            _ = shutdown.changed() => {
                if *shutdown.borrow() {
                    return;
                }
            }
        }

        let started = Instant::now();
        let now_ms = crate::wall_clock_ms();
        let diagnosis = checker.run_cycle(&prober, &store, now_ms).await;

        let rendered = render_cycle_report(&graph, &store, &diagnosis);
        if let Some(dir) = &config.presenter.report_dir {
            persist_report(dir, &diagnosis, &rendered);
        }

        // Critical issues notify immediately (deduplicated); warnings ride
        // along in the per-cycle reporter post.
        if let Some(webhook_url) = &config.presenter.webhook_url {
            for issue in &diagnosis.issues {
                if issue.severity == hcs_core::Severity::Critical
                    && ledger.should_notify(issue, config.presenter.suppress_ms, now_ms)
                {
                    outbox.enqueue(OutboxItem {
                        webhook_url: webhook_url.clone(),
                        text: issue_text(issue),
                        record: serde_json::to_value(issue).unwrap_or_default(),
                    });
                }
            }
        }
        if let Some(reporter_url) = &config.presenter.reporter_url {
            let text = format!(
                "diagnosis @{}: {} issue(s), roots [{}]",
                diagnosis.cycle_ts_ms,
                diagnosis.issues.len(),
                diagnosis
                    .report
                    .roots
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            outbox.enqueue(OutboxItem {
                webhook_url: reporter_url.clone(),
                text,
                record: serde_json::to_value(&diagnosis).unwrap_or_default(),
            });
        }

        *latest.write().expect("latest lock") = Some(Arc::new(diagnosis));

        let elapsed = started.elapsed().as_millis() as u64;
        if elapsed > interval_ms {
            let missed = elapsed / interval_ms;
            skipped_cycles += missed;
            tracing::warn!(
                elapsed_ms = elapsed,
                skipped_total = skipped_cycles,
                "cycle overran its interval; skipping {missed} tick(s)"
            );
        }
    }
}
