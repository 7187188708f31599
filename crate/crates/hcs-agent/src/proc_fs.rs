//! Parsers for the /proc texts the agent samples.
//!
//! All functions here are pure: they take raw file contents and return
//! numbers, so they run identically against the live /proc filesystem and
//! against recorded fixtures.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("malformed line: {0}")]
    MalformedLine(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpuError {
    #[error("cpu counter decreased (counter reset)")]
    CounterReset,
    #[error("no time elapsed between cpu snapshots")]
    ZeroDelta,
}

/// Aggregate cpu time counters from the first line of /proc/stat.
///
/// Guest time is omitted: the kernel already accounts it inside user/nice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CpuCounters {
    pub user: u64,
    pub nice: u64,
    pub system: u64,
    pub idle: u64,
    pub iowait: u64,
    pub irq: u64,
    pub softirq: u64,
    pub steal: u64,
}

impl CpuCounters {
    pub fn total(&self) -> u64 {
        self.user
            + self.nice
            + self.system
            + self.idle
            + self.iowait
            + self.irq
            + self.softirq
            + self.steal
    }

    fn fields(&self) -> [u64; 8] {
        [
            self.user, self.nice, self.system, self.idle, self.iowait, self.irq, self.softirq,
            self.steal,
        ]
    }
}

/// Extract memory and swap usage percentages from /proc/meminfo text.
///
/// `mem_used_pct = 100 * (MemTotal - MemAvailable) / MemTotal`;
/// `swap_used_pct = 100 * (SwapTotal - SwapFree) / SwapTotal`, defined as
/// 0.0 on machines without swap. Both clamp to [0, 100].
pub fn parse_meminfo(text: &str) -> Result<(f64, f64), ParseError> {
    let mem_total = meminfo_field(text, "MemTotal")?;
    let mem_available = meminfo_field(text, "MemAvailable")?;
    let swap_total = meminfo_field(text, "SwapTotal")?;
    let swap_free = meminfo_field(text, "SwapFree")?;

    let mem_used_pct = if mem_total == 0 {
        0.0
    } else {
        100.0 * (mem_total.saturating_sub(mem_available)) as f64 / mem_total as f64
    };
    let swap_used_pct = if swap_total == 0 {
        0.0
    } else {
        100.0 * (swap_total.saturating_sub(swap_free)) as f64 / swap_total as f64
    };
    Ok((mem_used_pct.clamp(0.0, 100.0), swap_used_pct.clamp(0.0, 100.0)))
}

fn meminfo_field(text: &str, key: &'static str) -> Result<u64, ParseError> {
    for line in text.lines() {
        let Some(rest) = line.strip_prefix(key) else {
            continue;
        };
        let Some(rest) = rest.strip_prefix(':') else {
            continue;
        };
        let number = rest.trim().trim_end_matches("kB").trim();
        return number
            .parse::<u64>()
            .map_err(|_| ParseError::MalformedLine(line.to_string()));
    }
    Err(ParseError::MissingField(key))
}

/// Parse the aggregate "cpu " line of /proc/stat.
pub fn parse_proc_stat(text: &str) -> Result<CpuCounters, ParseError> {
    let line = text
        .lines()
        .find(|l| l.starts_with("cpu ") || l.starts_with("cpu\t"))
        .ok_or(ParseError::MissingField("cpu"))?;
    let mut fields = line.split_whitespace().skip(1).map(|f| f.parse::<u64>());
    let mut next = |_name: &str| fields.next().transpose().ok().flatten();
    // Trailing fields may be absent on old kernels; treat them as zero.
    let counters = CpuCounters {
        user: next("user").ok_or_else(|| ParseError::MalformedLine(line.to_string()))?,
        nice: next("nice").unwrap_or(0),
        system: next("system").unwrap_or(0),
        idle: next("idle").unwrap_or(0),
        iowait: next("iowait").unwrap_or(0),
        irq: next("irq").unwrap_or(0),
        softirq: next("softirq").unwrap_or(0),
        steal: next("steal").unwrap_or(0),
    };
    Ok(counters)
}

/// Busy percentage between two counter snapshots:
/// `100 * (1 - (Δidle + Δiowait) / Δtotal)`, clamped to [0, 100].
pub fn compute_cpu_pct(prev: &CpuCounters, curr: &CpuCounters) -> Result<f64, CpuError> {
    for (p, c) in prev.fields().iter().zip(curr.fields().iter()) {
        if c < p {
            return Err(CpuError::CounterReset);
        }
    }
    let total_delta = curr.total() - prev.total();
    if total_delta == 0 {
        return Err(CpuError::ZeroDelta);
    }
    let idle_delta = (curr.idle - prev.idle) + (curr.iowait - prev.iowait);
    let pct = 100.0 * (1.0 - idle_delta as f64 / total_delta as f64);
    Ok(pct.clamp(0.0, 100.0))
}

/// Cumulative rx/tx byte counters summed over non-loopback interfaces,
/// parsed from /proc/net/dev text.
pub fn parse_net_dev(text: &str) -> Result<(u64, u64), ParseError> {
    let mut rx_total = 0u64;
    let mut tx_total = 0u64;
    let mut saw_interface = false;
    for line in text.lines().skip(2) {
        let Some((iface, rest)) = line.split_once(':') else {
            continue;
        };
        let iface = iface.trim();
        if iface == "lo" {
            continue;
        }
        let fields: Vec<&str> = rest.split_whitespace().collect();
        if fields.len() < 9 {
            return Err(ParseError::MalformedLine(line.to_string()));
        }
        let rx: u64 = fields[0]
            .parse()
            .map_err(|_| ParseError::MalformedLine(line.to_string()))?;
        let tx: u64 = fields[8]
            .parse()
            .map_err(|_| ParseError::MalformedLine(line.to_string()))?;
        rx_total += rx;
        tx_total += tx;
        saw_interface = true;
    }
    let _ = saw_interface;
    Ok((rx_total, tx_total))
}

/// Used percentage of the filesystem containing `path`, df-style.
#[cfg(unix)]
pub fn disk_used_pct(path: &std::path::Path) -> std::io::Result<f64> {
    use std::os::unix::ffi::OsStrExt;

    let c_path = std::ffi::CString::new(path.as_os_str().as_bytes())
        .map_err(|_| std::io::Error::other("path contains NUL"))?;
    let mut stat: libc::statvfs = unsafe { std::mem::zeroed() };
    let rc = unsafe { libc::statvfs(c_path.as_ptr(), &mut stat) };
    if rc != 0 {
        return Err(std::io::Error::last_os_error());
    }
    let used = stat.f_blocks.saturating_sub(stat.f_bfree);
    let denom = used + stat.f_bavail;
    if denom == 0 {
        return Ok(0.0);
    }
    Ok((100.0 * used as f64 / denom as f64).clamp(0.0, 100.0))
}
