//! Self-contained SVG line charts for metric series, with vertical event
//! markers (OOMK hits, delay detections) annotated by label.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 30.0;

/// Render one series as an 800x240 polyline chart.
///
/// `series` must be sorted ascending by timestamp. Values are min-max
/// scaled; a constant series draws at mid-height. An empty series renders a
/// "no data" placeholder. Each `(ts, label)` annotation becomes a vertical
/// marker with its label.
pub fn render_timeseries_svg(
    series: &[(i64, f64)],
    annotations: &[(i64, String)],
    title: &str,
    unit: &str,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"18\" font-size=\"14\" font-family=\"monospace\">{}</text>\n",
        MARGIN_LEFT,
        escape(title)
    ));

    if series.is_empty() {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"16\" font-family=\"monospace\" fill=\"gray\">no data</text>\n",
            WIDTH / 2.0 - 30.0,
            HEIGHT / 2.0
        ));
        out.push_str("</svg>\n");
        return out;
    }

    let t0 = series.first().expect("non-empty").0;
    let t1 = series.last().expect("non-empty").0;
    let t_span = ((t1 - t0) as f64).max(1.0);
    let v_min = series.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    let v_max = series.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
    let v_span = v_max - v_min;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |ts: i64| MARGIN_LEFT + ((ts - t0) as f64 / t_span) * plot_w;
    let y_of = |v: f64| {
        if v_span <= 0.0 {
            // Degenerate constant series: draw mid-height.
            MARGIN_TOP + plot_h / 2.0
        } else {
            MARGIN_TOP + (1.0 - (v - v_min) / v_span) * plot_h
        }
    };

    // Axes.
    out.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    ));
    out.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_BOTTOM
    ));
    out.push_str(&format!(
        "  <text x=\"4\" y=\"{}\" font-size=\"11\" font-family=\"monospace\">{:.1} {}</text>\n",
        MARGIN_TOP + 4.0,
        v_max,
        escape(unit)
    ));
    out.push_str(&format!(
        "  <text x=\"4\" y=\"{}\" font-size=\"11\" font-family=\"monospace\">{:.1} {}</text>\n",
        HEIGHT - MARGIN_BOTTOM,
        v_min,
        escape(unit)
    ));
    out.push_str(&format!(
        "  <text x=\"{MARGIN_LEFT}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\">t={t0}</text>\n",
        HEIGHT - 8.0
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"end\">t={t1}</text>\n",
        WIDTH - MARGIN_RIGHT,
        HEIGHT - 8.0
    ));

    // The series itself.
    let points: Vec<String> = series
        .iter()
        .map(|&(ts, v)| format!("{:.2},{:.2}", x_of(ts), y_of(v)))
        .collect();
    out.push_str(&format!(
        "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        points.join(" ")
    ));

    // Annotations: vertical marker plus label.
    for (ts, label) in annotations {
        let x = x_of((*ts).clamp(t0, t1));
        out.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{MARGIN_TOP}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"crimson\" stroke-dasharray=\"4 2\"/>\n",
            HEIGHT - MARGIN_BOTTOM
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\" fill=\"crimson\">{}</text>\n",
            x + 3.0,
            MARGIN_TOP + 12.0,
            escape(label)
        ));
    }

    out.push_str("</svg>\n");
    out
}

pub(crate) fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_ramp_with_oomk_marker() {
        let series: Vec<(i64, f64)> = (0..20).map(|i| (i * 1000, 5.0 * i as f64)).collect();
        let svg = render_timeseries_svg(
            &series,
            &[(15_000, "oomk".to_string())],
            "swap_used_pct on B",
            "percent",
        );
        assert!(svg.contains("<polyline"));
        assert!(svg.contains(">oomk</text>"));
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn empty_series_placeholder() {
        let svg = render_timeseries_svg(&[], &[], "nothing", "ms");
        assert!(svg.contains("no data"));
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn constant_series_sits_mid_height() {
        let series: Vec<(i64, f64)> = (0..10).map(|i| (i * 1000, 50.0)).collect();
        let svg = render_timeseries_svg(&series, &[], "flat", "percent");
        // plot area: 30..210, mid = 120.
        let expected_y = "120.00";
        let polyline = svg.lines().find(|l| l.contains("<polyline")).unwrap();
        assert!(polyline.contains(expected_y), "{polyline}");
        let count = polyline.matches(expected_y).count();
        assert_eq!(count, 10, "all points at mid-height");
    }

    #[test]
    fn labels_are_escaped() {
        let svg = render_timeseries_svg(
            &[(0, 1.0), (1, 2.0)],
            &[(1, "a<b>&\"c\"".to_string())],
            "t<&>t",
            "ms",
        );
        assert!(!svg.contains("a<b>"));
        assert!(svg.contains("a&lt;b&gt;&amp;&quot;c&quot;"));
    }
}
