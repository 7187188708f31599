//! Issue presenter: renders diagnoses for humans (DOT graph, SVG charts,
//! HTML report files) and pushes notifications to webhook endpoints with
//! per-issue suppression.

pub mod dot;
pub mod html;
pub mod notify;
pub mod svg;

pub use dot::render_dot;
pub use html::{render_report_html, write_report_files, ReportDirUnwritable};
pub use notify::{
    issue_text, post_report, DeliveryFailed, NotificationLedger, Outbox, OutboxItem,
    DEFAULT_SUPPRESS_MS,
};
pub use svg::render_timeseries_svg;
