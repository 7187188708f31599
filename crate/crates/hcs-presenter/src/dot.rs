//! Dependency graph rendering to Graphviz DOT.
//!
//! Output is deterministic: nodes in lexicographic id order, then edges in
//! lexicographic (dependent, dependency) order. Status is encoded as fill
//! color and root causes get a heavy outline.

use std::collections::BTreeMap;

use hcs_core::{DependencyGraph, HealthStatus, RootCauseReport};

fn fill_color(status: HealthStatus) -> &'static str {
    match status {
        HealthStatus::Healthy => "green",
        HealthStatus::Degraded => "orange",
        HealthStatus::Down => "red",
        HealthStatus::Unknown => "gray",
    }
}

/// Render the graph with per-service statuses; `report.roots` are drawn
/// with `penwidth=3`.
pub fn render_dot(
    graph: &DependencyGraph,
    statuses: &BTreeMap<String, HealthStatus>,
    report: &RootCauseReport,
) -> String {
    let mut out = String::from("digraph hcs {\n  rankdir=LR;\n  node [style=filled];\n");
    for id in graph.node_ids() {
        let status = statuses.get(id).copied().unwrap_or(HealthStatus::Unknown);
        let display = graph
            .descriptor(id)
            .map(|d| d.display_name.as_str())
            .unwrap_or(id);
        let penwidth = if report.roots.contains(id) { 3 } else { 1 };
        out.push_str(&format!(
            "  \"{id}\" [label=\"{display}\\n{status}\", fillcolor={}, penwidth={penwidth}];\n",
            fill_color(status),
        ));
    }
    for (dependent, dependency) in graph.edge_ids() {
        out.push_str(&format!(
            "  \"{dependent}\" -> \"{dependency}\" [label=\"requires\"];\n"
        ));
    }
    out.push_str("}\n");
    out
}
