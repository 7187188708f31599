//! System checker rules: swap, memory, disk, sustained cpu, OOMK victims
//! and collector failures, each with the evidence that tripped it.

use std::collections::BTreeMap;

use hcs_core::{Event, EventType, Evidence, IssueCategory, MetricSample, Severity};

use crate::thresholds::Thresholds;

/// An issue before identity assignment: the cycle stamps id and seen
/// timestamps via its continuity tracker.
#[derive(Debug, Clone, PartialEq)]
pub struct IssueDraft {
    pub category: IssueCategory,
    pub severity: Severity,
    pub subject: String,
    pub rule_id: &'static str,
    pub message: String,
    pub evidence: Vec<Evidence>,
    pub root_cause: Vec<String>,
}

impl IssueDraft {
    fn new(
        category: IssueCategory,
        severity: Severity,
        subject: &str,
        rule_id: &'static str,
        message: String,
    ) -> Self {
        IssueDraft {
            category,
            severity,
            subject: subject.to_string(),
            rule_id,
            message,
            evidence: Vec::new(),
            root_cause: Vec::new(),
        }
    }

    fn with_sample(mut self, sample: MetricSample) -> Self {
        self.evidence.push(Evidence::Sample(sample));
        self
    }

    fn with_events(mut self, events: &[&Event]) -> Self {
        self.evidence
            .extend(events.iter().map(|e| Evidence::Event((*e).clone())));
        self
    }
}

/// Latest fresh reading of one agent gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeReading {
    pub ts_ms: i64,
    pub value: f64,
}

fn gauge_sample(service: &str, name: &str, reading: GaugeReading) -> MetricSample {
    MetricSample::gauge(service, reading.ts_ms, name, reading.value, "percent")
}

/// Evaluate the system rules for one service.
///
/// `gauges` holds the latest fresh agent readings by metric name;
/// `events` the events attributed to this service since the last cycle;
/// `cpu_streak` the number of consecutive cycles (including this one) the
/// cpu gauge stayed at or above the warning threshold.
pub fn check_system(
    service: &str,
    gauges: &BTreeMap<String, GaugeReading>,
    events: &[Event],
    cpu_streak: u32,
    thresholds: &Thresholds,
) -> Vec<IssueDraft> {
    let mut issues = Vec::new();

    if let Some(&swap) = gauges.get("swap_used_pct") {
        if swap.value >= thresholds.swap_crit_pct {
            issues.push(
                IssueDraft::new(
                    IssueCategory::System,
                    Severity::Critical,
                    service,
                    "swap_exhausted",
                    format!("swap usage at {:.1}% on {service}", swap.value),
                )
                .with_sample(gauge_sample(service, "swap_used_pct", swap)),
            );
        } else if swap.value >= thresholds.swap_warn_pct {
            issues.push(
                IssueDraft::new(
                    IssueCategory::System,
                    Severity::Warning,
                    service,
                    "swap_high",
                    format!("swap usage at {:.1}% on {service}", swap.value),
                )
                .with_sample(gauge_sample(service, "swap_used_pct", swap)),
            );
        }
    }

    if let Some(&mem) = gauges.get("mem_used_pct") {
        if mem.value >= thresholds.mem_warn_pct {
            issues.push(
                IssueDraft::new(
                    IssueCategory::System,
                    Severity::Warning,
                    service,
                    "mem_high",
                    format!("memory usage at {:.1}% on {service}", mem.value),
                )
                .with_sample(gauge_sample(service, "mem_used_pct", mem)),
            );
        }
    }

    if let Some(&disk) = gauges.get("disk_used_pct") {
        if disk.value >= thresholds.disk_warn_pct {
            issues.push(
                IssueDraft::new(
                    IssueCategory::System,
                    Severity::Warning,
                    service,
                    "disk_high",
                    format!("disk usage at {:.1}% on {service}", disk.value),
                )
                .with_sample(gauge_sample(service, "disk_used_pct", disk)),
            );
        }
    }

    if let Some(&cpu) = gauges.get("cpu_pct") {
        if cpu_streak >= thresholds.cpu_sustained_cycles {
            issues.push(
                IssueDraft::new(
                    IssueCategory::System,
                    Severity::Warning,
                    service,
                    "cpu_saturated",
                    format!(
                        "cpu at {:.1}% for {cpu_streak} consecutive cycles on {service}",
                        cpu.value
                    ),
                )
                .with_sample(gauge_sample(service, "cpu_pct", cpu)),
            );
        }
    }

    let oomk: Vec<&Event> = events.iter().filter(|e| e.kind == EventType::Oomk).collect();
    if !oomk.is_empty() {
        let victims: Vec<String> = oomk
            .iter()
            .map(|e| {
                let pid = e.payload.get("victim_pid").map(String::as_str).unwrap_or("?");
                let name = e.payload.get("victim_name").map(String::as_str).unwrap_or("?");
                match e.payload.get("rss_kb") {
                    Some(rss) => format!("pid {pid} ({name}, anon-rss {rss} kB)"),
                    None => format!("pid {pid} ({name})"),
                }
            })
            .collect();
        issues.push(
            IssueDraft::new(
                IssueCategory::System,
                Severity::Critical,
                service,
                "oomk_victim",
                format!("OOM killer terminated {} on {service}", victims.join("; ")),
            )
            .with_events(&oomk),
        );
    }

    let probe_errors: Vec<&Event> = events
        .iter()
        .filter(|e| e.kind == EventType::ProbeError)
        .collect();
    if !probe_errors.is_empty() {
        issues.push(
            IssueDraft::new(
                IssueCategory::System,
                Severity::Warning,
                service,
                "collector_error",
                format!(
                    "metrics collector reported {} error(s) on {service}",
                    probe_errors.len()
                ),
            )
            .with_events(&probe_errors),
        );
    }

    issues
}
