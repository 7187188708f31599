//! Per-cycle report assembly: pick the series worth charting, render the
//! graph and page, write the report files.

use std::path::Path;

use hcs_checker::Diagnosis;
use hcs_core::{DependencyGraph, Evidence, EventType};
use hcs_presenter::{render_dot, render_report_html, render_timeseries_svg, write_report_files};
use hcs_store::SeriesStore;

/// Series charted per service when present.
const CHARTED_METRICS: [(&str, &str); 3] = [
    ("swap_used_pct", "percent"),
    ("db_query_ms", "ms"),
    ("connectivity_rtt_ms", "ms"),
];

/// How far back each chart looks.
const CHART_WINDOW_MS: i64 = 3_600_000;

pub struct RenderedReport {
    pub dot_text: String,
    pub svgs: Vec<(String, String)>,
    pub html_text: String,
}

/// Render everything for one diagnosis. Annotations come from the cycle's
/// issues: OOMK events mark the swap chart, latency detections mark the DB
/// chart.
pub fn render_cycle_report(
    graph: &DependencyGraph,
    store: &SeriesStore,
    diagnosis: &Diagnosis,
) -> RenderedReport {
    let dot_text = render_dot(graph, &diagnosis.statuses, &diagnosis.report);
    let now_ms = diagnosis.cycle_ts_ms;

    let mut svgs = Vec::new();
    for id in graph.node_ids() {
        for (metric, unit) in CHARTED_METRICS {
            let series = store
                .query_range(id, metric, now_ms - CHART_WINDOW_MS, now_ms + 1)
                .unwrap_or_default();
            if series.is_empty() {
                continue;
            }
            let annotations = annotations_for(diagnosis, id, metric);
            let title = format!("{metric} on {id}");
            svgs.push((
                title.clone(),
                render_timeseries_svg(&series, &annotations, &title, unit),
            ));
        }
    }

    let html_text = render_report_html(diagnosis, &dot_text, &svgs);
    RenderedReport { dot_text, svgs, html_text }
}

fn annotations_for(diagnosis: &Diagnosis, service: &str, metric: &str) -> Vec<(i64, String)> {
    let mut out = Vec::new();
    for issue in &diagnosis.issues {
        if issue.subject != service {
            continue;
        }
        match metric {
            "swap_used_pct" if issue.rule_id == "oomk_victim" => {
                for evidence in &issue.evidence {
                    if let Evidence::Event(event) = evidence {
                        if event.kind == EventType::Oomk {
                            out.push((event.ts_ms, "oomk".to_string()));
                        }
                    }
                }
            }
            "db_query_ms" if issue.rule_id == "latency_delay" => {
                out.push((issue.last_seen_ms, "latency_delay".to_string()));
            }
            _ => {}
        }
    }
    out
}

/// Write the rendered report; failures log and never fail the cycle.
pub fn persist_report(dir: &Path, diagnosis: &Diagnosis, report: &RenderedReport) {
    if let Err(err) =
        write_report_files(dir, diagnosis.cycle_ts_ms, &report.html_text, &report.dot_text)
    {
        tracing::error!("{err}; report skipped this cycle");
    }
}
