//! Self-contained HTML report for one diagnosis: status table, issue list
//! with evidence, inline charts, DOT source in a collapsible block.

use std::path::{Path, PathBuf};

use hcs_checker::Diagnosis;
use hcs_core::Evidence;

use crate::svg::escape;

/// Render one page. `svgs` are (chart title, svg text) pairs already
/// rendered; `dot_text` is the graph source included both as an inline
/// note and a collapsible block.
pub fn render_report_html(diagnosis: &Diagnosis, dot_text: &str, svgs: &[(String, String)]) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    out.push_str(&format!(
        "<title>diagnosis {}</title>\n",
        diagnosis.cycle_ts_ms
    ));
    out.push_str(
        "<style>\nbody { font-family: monospace; margin: 2em; }\ntable { border-collapse: collapse; }\ntd, th { border: 1px solid #999; padding: 4px 10px; text-align: left; }\n.critical { color: #b00020; font-weight: bold; }\n.warning { color: #b06000; }\n.badge { background: #eee; padding: 1px 6px; border-radius: 4px; }\n</style>\n</head>\n<body>\n",
    );
    out.push_str(&format!(
        "<h1>Health check diagnosis @ {}</h1>\n",
        diagnosis.cycle_ts_ms
    ));

    // Status table.
    out.push_str("<h2>Services</h2>\n<table>\n<tr><th>service</th><th>status</th><th>role</th><th>delay area</th></tr>\n");
    for (id, status) in &diagnosis.statuses {
        let role = if diagnosis.report.roots.contains(id) {
            "<span class=\"badge\">root cause</span>"
        } else if diagnosis.report.propagated.contains(id) {
            "<span class=\"badge\">propagated</span>"
        } else {
            ""
        };
        let delay = diagnosis
            .delay_areas
            .get(id)
            .map(String::as_str)
            .unwrap_or("");
        out.push_str(&format!(
            "<tr><td>{}</td><td>{status}</td><td>{role}</td><td>{}</td></tr>\n",
            escape(id),
            escape(delay),
        ));
    }
    out.push_str("</table>\n");

    // Issues.
    out.push_str(&format!("<h2>{} issues</h2>\n", diagnosis.issues.len()));
    if !diagnosis.issues.is_empty() {
        out.push_str("<ul>\n");
        for issue in &diagnosis.issues {
            let root_cause = if issue.root_cause.is_empty() {
                String::new()
            } else {
                format!(" — root cause: {}", escape(&issue.root_cause.join(", ")))
            };
            out.push_str(&format!(
                "<li><span class=\"{sev}\">{sev}</span> [{category}/{subject}] {rule}: {message}{root_cause}\n<ul>\n",
                sev = issue.severity,
                category = issue.category,
                subject = escape(&issue.subject),
                rule = escape(&issue.rule_id),
                message = escape(&issue.message),
            ));
            for evidence in &issue.evidence {
                match evidence {
                    Evidence::Sample(s) => out.push_str(&format!(
                        "<li>sample {} {}={} {} @ {}{}</li>\n",
                        escape(&s.source),
                        escape(&s.name),
                        s.value,
                        escape(&s.unit),
                        s.ts_ms,
                        if s.labels.is_empty() {
                            String::new()
                        } else {
                            format!(
                                " ({})",
                                s.labels
                                    .iter()
                                    .map(|(k, v)| format!("{}={}", escape(k), escape(v)))
                                    .collect::<Vec<_>>()
                                    .join(", ")
                            )
                        },
                    )),
                    Evidence::Event(e) => out.push_str(&format!(
                        "<li>event {:?} from {} @ {} {}</li>\n",
                        e.kind,
                        escape(&e.source),
                        e.ts_ms,
                        escape(
                            &e.payload
                                .iter()
                                .map(|(k, v)| format!("{k}={v}"))
                                .collect::<Vec<_>>()
                                .join(" ")
                        ),
                    )),
                }
            }
            out.push_str("</ul>\n</li>\n");
        }
        out.push_str("</ul>\n");
    }

    // Charts.
    for (title, svg) in svgs {
        out.push_str(&format!("<h2>{}</h2>\n", escape(title)));
        out.push_str(svg);
        out.push('\n');
    }

    // Graph source.
    out.push_str("<details>\n<summary>dependency graph (DOT)</summary>\n<pre>\n");
    out.push_str(&escape(dot_text));
    out.push_str("</pre>\n</details>\n</body>\n</html>\n");
    out
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write report under {dir}: {source}")]
pub struct ReportDirUnwritable {
    pub dir: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Write `diagnosis-<ts>.html`, a byte-identical `latest.html`, and
/// `graph-<ts>.dot` under `dir`.
pub fn write_report_files(
    dir: &Path,
    cycle_ts_ms: i64,
    html_text: &str,
    dot_text: &str,
) -> Result<PathBuf, ReportDirUnwritable> {
    let fail = |source| ReportDirUnwritable { dir: dir.to_path_buf(), source };
    std::fs::create_dir_all(dir).map_err(fail)?;
    let cycle_path = dir.join(format!("diagnosis-{cycle_ts_ms}.html"));
    std::fs::write(&cycle_path, html_text).map_err(fail)?;
    std::fs::write(dir.join("latest.html"), html_text).map_err(fail)?;
    std::fs::write(dir.join(format!("graph-{cycle_ts_ms}.dot")), dot_text).map_err(fail)?;
    Ok(cycle_path)
}
