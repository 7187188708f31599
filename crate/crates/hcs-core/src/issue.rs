use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Event, MetricSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueCategory {
    Connectivity,
    System,
    Service,
}

impl std::fmt::Display for IssueCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IssueCategory::Connectivity => "connectivity",
            IssueCategory::System => "system",
            IssueCategory::Service => "service",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Critical,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Severity::Warning => "warning",
            Severity::Critical => "critical",
        };
        f.write_str(s)
    }
}

/// A sample or event that triggered an issue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Sample(MetricSample),
    Event(Event),
}

/// One detected problem with its evidence and root-cause attribution.
///
/// `root_cause` lists the root services a propagated failure is blamed on,
/// sorted lexicographically; it is empty when no attribution applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub id: String,
    pub category: IssueCategory,
    pub severity: Severity,
    pub subject: String,
    pub rule_id: String,
    pub message: String,
    pub evidence: Vec<Evidence>,
    #[serde(default)]
    pub root_cause: Vec<String>,
    pub first_seen_ms: i64,
    pub last_seen_ms: i64,
}

impl Issue {
    /// Dedup key for notification suppression.
    pub fn dedup_key(&self) -> (IssueCategory, String, String) {
        (self.category, self.subject.clone(), self.rule_id.clone())
    }
}

/// Deterministic issue id: hash of (category, subject, rule_id, hour bucket
/// of first_seen). Stable across runs for the same logical issue.
pub fn issue_id(category: IssueCategory, subject: &str, rule_id: &str, first_seen_ms: i64) -> String {
    let bucket = first_seen_ms.div_euclid(3_600_000);
    let mut hasher = Sha256::new();
    hasher.update(category.to_string().as_bytes());
    hasher.update(b"|");
    hasher.update(subject.as_bytes());
    hasher.update(b"|");
    hasher.update(rule_id.as_bytes());
    hasher.update(b"|");
    hasher.update(bucket.to_le_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn issue_id_is_deterministic_and_bucketed() {
        let a = issue_id(IssueCategory::System, "B", "swap_exhausted", 10_000);
        let b = issue_id(IssueCategory::System, "B", "swap_exhausted", 20_000);
        assert_eq!(a, b, "same hour bucket, same id");
        let c = issue_id(IssueCategory::System, "B", "swap_exhausted", 3_600_000 + 10_000);
        assert_ne!(a, c, "next hour bucket changes the id");
        let d = issue_id(IssueCategory::System, "C", "swap_exhausted", 10_000);
        assert_ne!(a, d);
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn evidence_serializes_tagged() {
        let ev = Evidence::Sample(MetricSample::gauge("A", 1, "swap_used_pct", 100.0, "percent"));
        let json = serde_json::to_value(&ev).unwrap();
        assert!(json.get("sample").is_some());
    }
}
