//! OOM-killer detection from kernel log lines.
//!
//! Matches both the current form
//! `Out of memory: Killed process <pid> (<name>) total-vm:...kB, anon-rss:<n>kB, ...`
//! and the pre-5.0 form
//! `Out of memory: Kill process <pid> (<name>) score ... or sacrifice child`.

use std::sync::OnceLock;

use regex::Regex;

use hcs_core::{Event, EventType};

/// Victim identity pulled out of one kernel log line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OomkVictim {
    pub pid: u64,
    pub name: String,
    pub rss_kb: Option<u64>,
}

fn kill_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"Out of memory: Kill(?:ed)? process (\d+) \(([^)]+)\)").expect("static regex")
    })
}

fn rss_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"anon-rss:(\d+)kB").expect("static regex"))
}

/// Parse one kernel log line; None when the line is not an OOMK kill record.
pub fn parse_oomk_line(line: &str) -> Option<OomkVictim> {
    let caps = kill_re().captures(line)?;
    let pid = caps[1].parse().ok()?;
    let name = caps[2].to_string();
    let rss_kb = rss_re()
        .captures(line)
        .and_then(|c| c[1].parse::<u64>().ok());
    Some(OomkVictim { pid, name, rss_kb })
}

/// Scan a stream of kernel log lines and emit one oomk event per kill,
/// preserving input order. Non-matching lines are ignored.
pub fn detect_oomk<'a, I>(lines: I, source: &str, ts_ms: i64) -> Vec<Event>
where
    I: IntoIterator<Item = &'a str>,
{
    lines
        .into_iter()
        .filter_map(parse_oomk_line)
        .map(|victim| {
            let mut event = Event::new(source, ts_ms, EventType::Oomk)
                .with_payload("victim_pid", victim.pid.to_string())
                .with_payload("victim_name", victim.name);
            if let Some(rss) = victim.rss_kb {
                event = event.with_payload("rss_kb", rss.to_string());
            }
            event
        })
        .collect()
}
