//! Metric providers: where raw readings come from.
//!
//! `ProcProvider` reads the live /proc filesystem (root injectable for
//! fixture tests) plus an optional kernel log file; `SyntheticProvider`
//! replays a scripted timeline and is what the simulated mesh attaches to
//! its services. Both produce the same `SystemReading` semantics.

use std::fs;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::proc_fs::{self, compute_cpu_pct, CpuCounters};

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("provider unavailable: {0}")]
    Unavailable(String),
}

/// One tick's worth of cooked readings.
///
/// `cpu_pct` is None when no previous counter snapshot exists yet or the
/// counters reset; network rates are 0.0 on the first tick for the same
/// reason.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemReading {
    pub cpu_pct: Option<f64>,
    pub mem_used_pct: f64,
    pub swap_used_pct: f64,
    pub disk_used_pct: f64,
    pub net_rx_bytes_per_s: f64,
    pub net_tx_bytes_per_s: f64,
    /// New kernel log lines since the previous tick.
    pub kernel_log_lines: Vec<String>,
}

pub trait MetricProvider: Send {
    fn read(&mut self, now_ms: i64) -> Result<SystemReading, ProviderError>;
}

// ---------------------------------------------------------------------------
// /proc-backed provider
// ---------------------------------------------------------------------------

pub struct ProcProvider {
    proc_root: PathBuf,
    disk_path: PathBuf,
    kmsg: Option<LogFollower>,
    prev_cpu: Option<CpuCounters>,
    prev_net: Option<(i64, u64, u64)>,
}

impl ProcProvider {
    pub fn new(disk_path: impl Into<PathBuf>, kmsg_path: Option<PathBuf>) -> Self {
        Self::with_root("/proc", disk_path, kmsg_path)
    }

    /// Same provider against an alternate /proc root (recorded fixtures).
    pub fn with_root(
        proc_root: impl Into<PathBuf>,
        disk_path: impl Into<PathBuf>,
        kmsg_path: Option<PathBuf>,
    ) -> Self {
        ProcProvider {
            proc_root: proc_root.into(),
            disk_path: disk_path.into(),
            kmsg: kmsg_path.map(LogFollower::new),
            prev_cpu: None,
            prev_net: None,
        }
    }

    fn read_text(&self, name: &str) -> Result<String, ProviderError> {
        fs::read_to_string(self.proc_root.join(name))
            .map_err(|e| ProviderError::Unavailable(format!("{name}: {e}")))
    }
}

impl MetricProvider for ProcProvider {
    fn read(&mut self, now_ms: i64) -> Result<SystemReading, ProviderError> {
        let meminfo = self.read_text("meminfo")?;
        let (mem_used_pct, swap_used_pct) = proc_fs::parse_meminfo(&meminfo)
            .map_err(|e| ProviderError::Unavailable(format!("meminfo: {e}")))?;

        let stat = self.read_text("stat")?;
        let cpu_now = proc_fs::parse_proc_stat(&stat)
            .map_err(|e| ProviderError::Unavailable(format!("stat: {e}")))?;
        let cpu_pct = match self.prev_cpu {
            // Counter resets and zero deltas skip the sample this tick.
            Some(prev) => compute_cpu_pct(&prev, &cpu_now).ok(),
            None => None,
        };
        self.prev_cpu = Some(cpu_now);

        let net_dev = self.read_text("net/dev")?;
        let (rx, tx) = proc_fs::parse_net_dev(&net_dev)
            .map_err(|e| ProviderError::Unavailable(format!("net/dev: {e}")))?;
        let (net_rx_bytes_per_s, net_tx_bytes_per_s) = match self.prev_net {
            Some((prev_ms, prev_rx, prev_tx)) if now_ms > prev_ms && rx >= prev_rx && tx >= prev_tx => {
                let dt = (now_ms - prev_ms) as f64 / 1000.0;
                ((rx - prev_rx) as f64 / dt, (tx - prev_tx) as f64 / dt)
            }
            _ => (0.0, 0.0),
        };
        self.prev_net = Some((now_ms, rx, tx));

        let disk_used_pct = proc_fs::disk_used_pct(&self.disk_path)
            .map_err(|e| ProviderError::Unavailable(format!("statvfs: {e}")))?;

        let kernel_log_lines = match &mut self.kmsg {
            Some(follower) => follower.poll_lines(),
            None => Vec::new(),
        };

        Ok(SystemReading {
            cpu_pct,
            mem_used_pct,
            swap_used_pct,
            disk_used_pct,
            net_rx_bytes_per_s,
            net_tx_bytes_per_s,
            kernel_log_lines,
        })
    }
}

/// Tail-style follower over a log file: returns complete new lines appended
/// since the last poll, reopening from the start if the file shrank.
pub struct LogFollower {
    path: PathBuf,
    offset: u64,
}

impl LogFollower {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        LogFollower { path: path.into(), offset: 0 }
    }

    pub fn poll_lines(&mut self) -> Vec<String> {
        let Ok(mut file) = fs::File::open(&self.path) else {
            return Vec::new();
        };
        let len = file.metadata().map(|m| m.len()).unwrap_or(0);
        if len < self.offset {
            self.offset = 0;
        }
        if file.seek(SeekFrom::Start(self.offset)).is_err() {
            return Vec::new();
        }
        let mut buf = String::new();
        if file.read_to_string(&mut buf).is_err() {
            return Vec::new();
        }
        // Hold back a trailing partial line until its newline arrives.
        let complete_len = match buf.rfind('\n') {
            Some(pos) => pos + 1,
            None => return Vec::new(),
        };
        self.offset += complete_len as u64;
        buf[..complete_len]
            .lines()
            .map(str::to_string)
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Scripted provider
// ---------------------------------------------------------------------------

/// Baseline gauge levels a script starts from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLevels {
    #[serde(default = "default_cpu")]
    pub cpu_pct: f64,
    #[serde(default = "default_mem")]
    pub mem_used_pct: f64,
    #[serde(default = "default_swap")]
    pub swap_used_pct: f64,
    #[serde(default = "default_disk")]
    pub disk_used_pct: f64,
    #[serde(default = "default_rate")]
    pub net_rx_bytes_per_s: f64,
    #[serde(default = "default_rate")]
    pub net_tx_bytes_per_s: f64,
}

fn default_cpu() -> f64 {
    15.0
}
fn default_mem() -> f64 {
    40.0
}
fn default_swap() -> f64 {
    5.0
}
fn default_disk() -> f64 {
    35.0
}
fn default_rate() -> f64 {
    1024.0
}

impl Default for SyntheticLevels {
    fn default() -> Self {
        SyntheticLevels {
            cpu_pct: default_cpu(),
            mem_used_pct: default_mem(),
            swap_used_pct: default_swap(),
            disk_used_pct: default_disk(),
            net_rx_bytes_per_s: default_rate(),
            net_tx_bytes_per_s: default_rate(),
        }
    }
}

/// One timeline step: values hold from `at_ms` (script-relative) onward;
/// kernel log lines are emitted once when the step is first reached.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStep {
    pub at_ms: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mem_used_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap_used_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk_used_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_rx_bytes_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net_tx_bytes_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kmsg: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyntheticScript {
    #[serde(default)]
    pub initial: SyntheticLevels,
    #[serde(default)]
    pub steps: Vec<SyntheticStep>,
}

impl SyntheticScript {
    pub fn from_file(path: &Path) -> Result<Self, ProviderError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ProviderError::Unavailable(format!("script: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| ProviderError::Unavailable(format!("script: {e}")))
    }
}

struct ScriptState {
    script: SyntheticScript,
    /// Kernel log lines not yet delivered, as (due at_ms, line).
    pending_kmsg: Vec<(i64, String)>,
    fail: bool,
    /// Wall-clock ms of the first read; script times are relative to it.
    base_ms: Option<i64>,
}

/// Shared handle the sim mesh uses to mutate a running script (swap ramps,
/// injected kernel lines, forced failures).
#[derive(Clone)]
pub struct ScriptHandle(Arc<Mutex<ScriptState>>);

impl ScriptHandle {
    pub fn new(script: SyntheticScript) -> Self {
        let pending_kmsg = script
            .steps
            .iter()
            .flat_map(|s| s.kmsg.iter().map(|l| (s.at_ms, l.clone())))
            .collect();
        ScriptHandle(Arc::new(Mutex::new(ScriptState {
            script,
            pending_kmsg,
            fail: false,
            base_ms: None,
        })))
    }

    pub fn push_step(&self, step: SyntheticStep) {
        let mut state = self.0.lock().expect("script lock");
        state
            .pending_kmsg
            .extend(step.kmsg.iter().map(|l| (step.at_ms, l.clone())));
        state.script.steps.push(step);
        state.script.steps.sort_by_key(|s| s.at_ms);
    }

    /// Script-relative time of a wall-clock instant; 0 until the provider's
    /// first read establishes the base.
    pub fn rel_ms(&self, wall_ms: i64) -> i64 {
        let state = self.0.lock().expect("script lock");
        state.base_ms.map(|base| wall_ms - base).unwrap_or(0)
    }

    /// Make subsequent reads fail (exercises the probe_error path).
    pub fn set_failing(&self, fail: bool) {
        self.0.lock().expect("script lock").fail = fail;
    }
}

pub struct SyntheticProvider {
    handle: ScriptHandle,
}

impl SyntheticProvider {
    pub fn new(script: SyntheticScript) -> Self {
        SyntheticProvider::with_handle(ScriptHandle::new(script))
    }

    pub fn with_handle(handle: ScriptHandle) -> Self {
        SyntheticProvider { handle }
    }

    pub fn handle(&self) -> ScriptHandle {
        self.handle.clone()
    }
}

impl MetricProvider for SyntheticProvider {
    fn read(&mut self, now_ms: i64) -> Result<SystemReading, ProviderError> {
        let mut state = self.handle.0.lock().expect("script lock");
        if state.fail {
            return Err(ProviderError::Unavailable("scripted failure".to_string()));
        }
        let base = *state.base_ms.get_or_insert(now_ms);
        let rel_ms = now_ms - base;

        let mut levels = state.script.initial;
        for step in &state.script.steps {
            if step.at_ms > rel_ms {
                break;
            }
            if let Some(v) = step.cpu_pct {
                levels.cpu_pct = v;
            }
            if let Some(v) = step.mem_used_pct {
                levels.mem_used_pct = v;
            }
            if let Some(v) = step.swap_used_pct {
                levels.swap_used_pct = v;
            }
            if let Some(v) = step.disk_used_pct {
                levels.disk_used_pct = v;
            }
            if let Some(v) = step.net_rx_bytes_per_s {
                levels.net_rx_bytes_per_s = v;
            }
            if let Some(v) = step.net_tx_bytes_per_s {
                levels.net_tx_bytes_per_s = v;
            }
        }
        let mut kernel_log_lines = Vec::new();
        state.pending_kmsg.retain(|(at_ms, line)| {
            if *at_ms <= rel_ms {
                kernel_log_lines.push(line.clone());
                false
            } else {
                true
            }
        });

        Ok(SystemReading {
            cpu_pct: Some(levels.cpu_pct.clamp(0.0, 100.0)),
            mem_used_pct: levels.mem_used_pct.clamp(0.0, 100.0),
            swap_used_pct: levels.swap_used_pct.clamp(0.0, 100.0),
            disk_used_pct: levels.disk_used_pct.clamp(0.0, 100.0),
            net_rx_bytes_per_s: levels.net_rx_bytes_per_s.max(0.0),
            net_tx_bytes_per_s: levels.net_tx_bytes_per_s.max(0.0),
            kernel_log_lines,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_steps_hold_latest_value() {
        let script = SyntheticScript {
            initial: SyntheticLevels::default(),
            steps: vec![
                SyntheticStep { at_ms: 1000, swap_used_pct: Some(50.0), ..Default::default() },
                SyntheticStep { at_ms: 2000, swap_used_pct: Some(100.0), ..Default::default() },
            ],
        };
        let mut provider = SyntheticProvider::new(script);
        assert_eq!(provider.read(10_000).unwrap().swap_used_pct, 5.0);
        assert_eq!(provider.read(11_000).unwrap().swap_used_pct, 50.0);
        assert_eq!(provider.read(12_500).unwrap().swap_used_pct, 100.0);
    }

    #[test]
    fn synthetic_kmsg_emitted_once() {
        let script = SyntheticScript {
            initial: SyntheticLevels::default(),
            steps: vec![SyntheticStep {
                at_ms: 500,
                kmsg: vec!["Out of memory: Killed process 1 (x) anon-rss:2kB".to_string()],
                ..Default::default()
            }],
        };
        let mut provider = SyntheticProvider::new(script);
        assert!(provider.read(0).unwrap().kernel_log_lines.is_empty());
        assert_eq!(provider.read(600).unwrap().kernel_log_lines.len(), 1);
        assert!(provider.read(700).unwrap().kernel_log_lines.is_empty());
    }

    #[test]
    fn injected_step_applies_mid_run() {
        let mut provider = SyntheticProvider::new(SyntheticScript::default());
        let handle = provider.handle();
        provider.read(1_000).unwrap();
        handle.push_step(SyntheticStep {
            at_ms: 1_500,
            swap_used_pct: Some(90.0),
            ..Default::default()
        });
        assert_eq!(provider.read(3_000).unwrap().swap_used_pct, 90.0);
    }

    #[test]
    fn scripted_failure_surfaces() {
        let mut provider = SyntheticProvider::new(SyntheticScript::default());
        provider.handle().set_failing(true);
        assert!(provider.read(0).is_err());
    }

    #[test]
    fn log_follower_reads_appended_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kmsg.log");
        std::fs::write(&path, "first line\n").unwrap();

        let mut follower = LogFollower::new(&path);
        assert_eq!(follower.poll_lines(), vec!["first line".to_string()]);
        assert!(follower.poll_lines().is_empty());

        use std::io::Write;
        let mut f = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
        write!(f, "second line\npartial").unwrap();
        drop(f);
        assert_eq!(follower.poll_lines(), vec!["second line".to_string()]);

        let mut f = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
        writeln!(f, " finished").unwrap();
        drop(f);
        assert_eq!(follower.poll_lines(), vec!["partial finished".to_string()]);
    }
}
