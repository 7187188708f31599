//! One check cycle: probe everything, discretize statuses, run the rule
//! set, classify failures on the dependency graph, and emit a Diagnosis.
//!
//! The checker owns all evolving state (liveness windows, latency
//! baselines, cpu streaks, issue continuity); a cycle is deterministic
//! given the probe results, the store contents and `now_ms`.

use std::collections::BTreeMap;
use std::sync::Arc;

use futures::future::join_all;
use serde::{Deserialize, Serialize};

use hcs_core::{
    issue_id, worst_status, DependencyGraph, Event, EventType, Evidence, HealthStatus, Issue,
    IssueCategory, MetricSample, RootCauseReport, Severity,
};
use hcs_store::SeriesStore;

use crate::baseline::{classify_delay_area, observe_latency, DelayCheck, LatencyBaseline};
use crate::liveness::{liveness_status, LivenessWindow};
use crate::probe::{ProbeOutcome, Prober};
use crate::rules::{check_system, GaugeReading, IssueDraft};
use crate::thresholds::Thresholds;

/// Agent gauge names consulted for staleness and system rules.
const AGENT_GAUGES: [&str; 6] = [
    "cpu_pct",
    "mem_used_pct",
    "swap_used_pct",
    "disk_used_pct",
    "net_rx_bytes_per_s",
    "net_tx_bytes_per_s",
];

/// Service-level probes configured per service, on top of the always-on
/// connectivity probe.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ServiceProbeConfig {
    /// Named DB statement to time via `GET /db/probe?stmt=<name>`.
    #[serde(default)]
    pub db_stmt: Option<String>,
    /// Static expected DB latency; replaces the learned EWMA when set.
    #[serde(default)]
    pub db_expected_ms: Option<f64>,
    /// Path for a REST round-trip probe, e.g. `/work`.
    #[serde(default)]
    pub rest_path: Option<String>,
}

/// Full output of one check cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub cycle_ts_ms: i64,
    pub statuses: BTreeMap<String, HealthStatus>,
    pub report: RootCauseReport,
    pub issues: Vec<Issue>,
    /// Dominant slow component per service, when one is delayed.
    pub delay_areas: BTreeMap<String, String>,
}

impl Diagnosis {
    pub fn issues_with_rule<'a>(&'a self, rule_id: &'a str) -> impl Iterator<Item = &'a Issue> + 'a {
        self.issues.iter().filter(move |i| i.rule_id == rule_id)
    }
}

pub struct Checker {
    graph: Arc<DependencyGraph>,
    thresholds: Thresholds,
    probes: BTreeMap<String, ServiceProbeConfig>,
    liveness: BTreeMap<String, LivenessWindow>,
    baselines: BTreeMap<(String, &'static str), LatencyBaseline>,
    cpu_streaks: BTreeMap<String, u32>,
    first_seen: BTreeMap<(IssueCategory, String, String), i64>,
    last_cycle_ms: Option<i64>,
}

struct ServiceProbes {
    connectivity: ProbeOutcome,
    db: Option<(String, ProbeOutcome)>,
    rest: Option<ProbeOutcome>,
}

impl Checker {
    pub fn new(
        graph: Arc<DependencyGraph>,
        thresholds: Thresholds,
        probes: BTreeMap<String, ServiceProbeConfig>,
    ) -> Self {
        Checker {
            graph,
            thresholds,
            probes,
            liveness: BTreeMap::new(),
            baselines: BTreeMap::new(),
            cpu_streaks: BTreeMap::new(),
            first_seen: BTreeMap::new(),
            last_cycle_ms: None,
        }
    }

    pub fn graph(&self) -> &DependencyGraph {
        &self.graph
    }

    /// Run one full cycle at `now_ms`. Probes run concurrently; everything
    /// after the join is sequential and deterministic.
    pub async fn run_cycle(
        &mut self,
        prober: &dyn Prober,
        store: &SeriesStore,
        now_ms: i64,
    ) -> Diagnosis {
        let results = self.probe_all(prober).await;
        self.evaluate(results, store, now_ms)
    }

    async fn probe_all(&self, prober: &dyn Prober) -> BTreeMap<String, ServiceProbes> {
        let timeout = self.thresholds.probe_timeout_ms;
        let mut futures = Vec::new();
        for descriptor in self.graph.descriptors() {
            let config = self.probes.get(&descriptor.id).cloned().unwrap_or_default();
            let base = format!("http://{}", descriptor.probe_address);
            let health_url = descriptor.probe_url();
            let db = config
                .db_stmt
                .clone()
                .map(|stmt| (stmt.clone(), format!("{base}/db/probe?stmt={stmt}")));
            let rest_url = config.rest_path.as_ref().map(|p| format!("{base}{p}"));
            let id = descriptor.id.clone();
            futures.push(async move {
                let connectivity = prober.probe(&health_url, timeout).await;
                let db = match db {
                    Some((stmt, url)) => Some((stmt, prober.probe(&url, timeout).await)),
                    None => None,
                };
                let rest = match rest_url {
                    Some(url) => Some(prober.probe(&url, timeout).await),
                    None => None,
                };
                (id, ServiceProbes { connectivity, db, rest })
            });
        }
        join_all(futures).await.into_iter().collect()
    }

    fn evaluate(
        &mut self,
        results: BTreeMap<String, ServiceProbes>,
        store: &SeriesStore,
        now_ms: i64,
    ) -> Diagnosis {
        let thresholds = self.thresholds;
        let window_start = self.last_cycle_ms.unwrap_or(0);
        self.last_cycle_ms = Some(now_ms);

        let mut events_by_source: BTreeMap<String, Vec<Event>> = BTreeMap::new();
        for event in store.events_in(window_start, now_ms) {
            events_by_source.entry(event.source.clone()).or_default().push(event);
        }

        let mut drafts: Vec<IssueDraft> = Vec::new();
        let mut statuses: BTreeMap<String, HealthStatus> = BTreeMap::new();
        let mut delay_areas: BTreeMap<String, String> = BTreeMap::new();
        let mut liveness_by_service: BTreeMap<String, HealthStatus> = BTreeMap::new();

        for id in self.graph.node_ids().map(str::to_string).collect::<Vec<_>>() {
            let probes = results.get(&id);

            // Connectivity: update the window, record the rtt.
            if let Some(probes) = probes {
                let window = self.liveness.entry(id.clone()).or_default();
                window.push(probes.connectivity);
                if let Some(rtt) = probes.connectivity.rtt_ms() {
                    store.record_sample(MetricSample::gauge(
                        &id,
                        now_ms,
                        "connectivity_rtt_ms",
                        rtt,
                        "ms",
                    ));
                }
            }
            let live = liveness_status(
                self.liveness.entry(id.clone()).or_default(),
                &thresholds,
            );
            liveness_by_service.insert(id.clone(), live);

            // Freshness of agent data.
            let mut gauges: BTreeMap<String, GaugeReading> = BTreeMap::new();
            for name in AGENT_GAUGES {
                if let Some((ts_ms, value)) = store.latest(&id, name, thresholds.staleness_ms, now_ms)
                {
                    gauges.insert(name.to_string(), GaugeReading { ts_ms, value });
                }
            }
            let stale = gauges.is_empty();

            // Sustained-cpu streak.
            let streak = self.cpu_streaks.entry(id.clone()).or_insert(0);
            match gauges.get("cpu_pct") {
                Some(cpu) if cpu.value >= thresholds.cpu_warn_pct => *streak += 1,
                _ => *streak = 0,
            }
            let streak = *streak;

            // System rules.
            let no_events = Vec::new();
            let events = events_by_source.get(&id).unwrap_or(&no_events);
            let system_drafts = check_system(&id, &gauges, events, streak, &thresholds);
            let host_distressed = system_drafts
                .iter()
                .any(|d| d.rule_id == "swap_exhausted" || d.rule_id == "oomk_victim");
            drafts.extend(system_drafts);

            if stale {
                drafts.push(data_stale_draft(&id, now_ms, thresholds.staleness_ms));
            }

            // Service checker: latency components against their baselines.
            if let Some(probes) = probes {
                let mut checks: Vec<(&'static str, DelayCheck, Option<String>)> = Vec::new();
                let config = self.probes.get(&id).cloned().unwrap_or_default();

                if let Some((stmt, outcome)) = &probes.db {
                    if let Some(rtt) = outcome.rtt_ms() {
                        store.record_sample(
                            MetricSample::gauge(&id, now_ms, "db_query_ms", rtt, "ms")
                                .with_label("stmt", stmt),
                        );
                        let baseline = self
                            .baselines
                            .entry((id.clone(), "db_query"))
                            .or_default();
                        if let Some(check) =
                            observe_latency(baseline, rtt, config.db_expected_ms, &thresholds)
                        {
                            checks.push(("db_query", check, Some(stmt.clone())));
                        }
                    }
                }
                if let Some(outcome) = &probes.rest {
                    if let Some(rtt) = outcome.rtt_ms() {
                        store.record_sample(MetricSample::gauge(
                            &id, now_ms, "rest_rtt_ms", rtt, "ms",
                        ));
                        let baseline = self
                            .baselines
                            .entry((id.clone(), "rest_rtt"))
                            .or_default();
                        if let Some(check) = observe_latency(baseline, rtt, None, &thresholds) {
                            checks.push(("rest_rtt", check, None));
                        }
                    }
                }
                if let Some(rtt) = probes.connectivity.rtt_ms() {
                    let baseline = self
                        .baselines
                        .entry((id.clone(), "network_rtt"))
                        .or_default();
                    if let Some(check) = observe_latency(baseline, rtt, None, &thresholds) {
                        checks.push(("network_rtt", check, None));
                    }
                }

                if checks.iter().any(|(_, c, _)| c.delayed) {
                    drafts.push(latency_delay_draft(&id, &checks, now_ms));
                }
                if let Some(area) =
                    classify_delay_area(checks.iter().map(|(name, check, _)| (*name, *check)))
                {
                    delay_areas.insert(id.clone(), area.to_string());
                }
            }

            // Merge the per-source evidence into one status.
            let mut contributions = vec![live];
            if host_distressed {
                // Host distress degrades; only connectivity evidence downs.
                contributions.push(HealthStatus::Degraded);
            }
            if stale {
                contributions.push(HealthStatus::Unknown);
            }
            let status = worst_status(contributions).expect("non-empty contributions");
            statuses.insert(id.clone(), status);
        }

        let report = self.graph.classify_failures(&statuses);

        // Connectivity issues, with root-cause attribution for propagated
        // failures.
        for (id, live) in &liveness_by_service {
            let newest = self
                .liveness
                .get(id)
                .and_then(|w| w.newest().copied())
                .unwrap_or(ProbeOutcome::Timeout);
            let mut draft = match live {
                HealthStatus::Down => connectivity_draft(
                    id,
                    Severity::Critical,
                    "service_down",
                    format!("{id} is down: probe {}", newest.describe()),
                    newest,
                    now_ms,
                ),
                HealthStatus::Degraded => connectivity_draft(
                    id,
                    Severity::Warning,
                    "service_degraded",
                    format!("{id} is degraded: probe {}", newest.describe()),
                    newest,
                    now_ms,
                ),
                _ => continue,
            };
            if report.propagated.contains(id) {
                let reachable = self
                    .graph
                    .transitive_dependencies(id)
                    .unwrap_or_default();
                draft.root_cause = reachable.intersection(&report.roots).cloned().collect();
            }
            drafts.push(draft);
        }

        // Store-level operational warnings (journal failures).
        for warning in store.drain_warnings() {
            let event = Event::new("receiver", now_ms, EventType::ProbeError)
                .with_payload("error", warning.message.clone());
            drafts.push(IssueDraft {
                category: IssueCategory::System,
                severity: Severity::Warning,
                subject: "receiver".to_string(),
                rule_id: "journal_unwritable",
                message: warning.message,
                evidence: vec![Evidence::Event(event)],
                root_cause: Vec::new(),
            });
        }

        let issues = self.assign_identity(drafts, now_ms);

        Diagnosis {
            cycle_ts_ms: now_ms,
            statuses,
            report,
            issues,
            delay_areas,
        }
    }

    /// Stamp drafts with deterministic ids and first/last seen times,
    /// tracking continuity across cycles.
    fn assign_identity(&mut self, drafts: Vec<IssueDraft>, now_ms: i64) -> Vec<Issue> {
        let mut seen_keys = std::collections::BTreeSet::new();
        let mut issues: Vec<Issue> = drafts
            .into_iter()
            .map(|draft| {
                let key = (draft.category, draft.subject.clone(), draft.rule_id.to_string());
                let first_seen = *self.first_seen.entry(key.clone()).or_insert(now_ms);
                seen_keys.insert(key);
                Issue {
                    id: issue_id(draft.category, &draft.subject, draft.rule_id, first_seen),
                    category: draft.category,
                    severity: draft.severity,
                    subject: draft.subject,
                    rule_id: draft.rule_id.to_string(),
                    message: draft.message,
                    evidence: draft.evidence,
                    root_cause: draft.root_cause,
                    first_seen_ms: first_seen,
                    last_seen_ms: now_ms,
                }
            })
            .collect();
        self.first_seen.retain(|key, _| seen_keys.contains(key));
        issues.sort_by(|a, b| {
            (a.category, &a.subject, &a.rule_id).cmp(&(b.category, &b.subject, &b.rule_id))
        });
        issues
    }
}

fn data_stale_draft(id: &str, now_ms: i64, staleness_ms: i64) -> IssueDraft {
    let event = Event::new(id, now_ms, EventType::ProbeError)
        .with_payload("reason", format!("no agent samples within {staleness_ms} ms"));
    IssueDraft {
        category: IssueCategory::System,
        severity: Severity::Warning,
        subject: id.to_string(),
        rule_id: "data_stale",
        message: format!("no agent data from {id} within {staleness_ms} ms"),
        evidence: vec![Evidence::Event(event)],
        root_cause: Vec::new(),
    }
}

fn connectivity_draft(
    id: &str,
    severity: Severity,
    rule_id: &'static str,
    message: String,
    newest: ProbeOutcome,
    now_ms: i64,
) -> IssueDraft {
    let event = Event::new(id, now_ms, EventType::ProbeError)
        .with_payload("probe", "connectivity")
        .with_payload("outcome", newest.describe());
    IssueDraft {
        category: IssueCategory::Connectivity,
        severity,
        subject: id.to_string(),
        rule_id,
        message,
        evidence: vec![Evidence::Event(event)],
        root_cause: Vec::new(),
    }
}

fn latency_delay_draft(
    id: &str,
    checks: &[(&'static str, DelayCheck, Option<String>)],
    now_ms: i64,
) -> IssueDraft {
    let mut parts = Vec::new();
    let mut evidence = Vec::new();
    for (component, check, stmt) in checks {
        if !check.delayed {
            continue;
        }
        let detail = match stmt {
            Some(stmt) => format!(
                "{component} {:.1} ms exceeds expected {:.1} ms (stmt {stmt})",
                check.observation_ms, check.baseline_ms
            ),
            None => format!(
                "{component} {:.1} ms exceeds expected {:.1} ms",
                check.observation_ms, check.baseline_ms
            ),
        };
        parts.push(detail);
        let gauge_name = match *component {
            "db_query" => "db_query_ms",
            "rest_rtt" => "rest_rtt_ms",
            _ => "connectivity_rtt_ms",
        };
        let mut sample = MetricSample::gauge(id, now_ms, gauge_name, check.observation_ms, "ms")
            .with_label("component", component)
            .with_label("baseline_ms", &format!("{:.3}", check.baseline_ms));
        if let Some(stmt) = stmt {
            sample = sample.with_label("stmt", stmt);
        }
        evidence.push(Evidence::Sample(sample));
    }
    IssueDraft {
        category: IssueCategory::Service,
        severity: Severity::Warning,
        subject: id.to_string(),
        rule_id: "latency_delay",
        message: format!("{id} delayed: {}", parts.join("; ")),
        evidence,
        root_cause: Vec::new(),
    }
}
