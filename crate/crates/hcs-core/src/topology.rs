//! Topology file loading.
//!
//! The daemon declares its service mesh in a JSON file:
//!
//! ```json
//! {
//!   "services": [
//!     {"id": "A", "probe_address": "127.0.0.1:7001", "probe_path": "/health"}
//!   ],
//!   "requires": [["B", "A"]]
//! }
//! ```
//!
//! Malformed files produce errors carrying the line and column so startup
//! failures point at the offending spot.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{CoreError, DependencyGraph, ServiceDescriptor};

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("cannot read topology file: {0}")]
    Io(#[from] std::io::Error),
    /// serde_json errors render as "... at line N column M".
    #[error("invalid topology JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid topology: {0}")]
    Graph(#[from] CoreError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyFile {
    pub services: Vec<ServiceEntry>,
    #[serde(default)]
    pub requires: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ServiceEntry {
    pub id: String,
    #[serde(default)]
    pub display_name: Option<String>,
    pub probe_address: String,
    #[serde(default = "default_probe_path")]
    pub probe_path: String,
}

fn default_probe_path() -> String {
    "/health".to_string()
}

impl From<ServiceEntry> for ServiceDescriptor {
    fn from(entry: ServiceEntry) -> Self {
        ServiceDescriptor {
            display_name: entry.display_name.unwrap_or_else(|| entry.id.clone()),
            id: entry.id,
            probe_address: entry.probe_address,
            probe_path: entry.probe_path,
        }
    }
}

/// Parse topology JSON and build the validated graph.
pub fn parse_topology(text: &str) -> Result<DependencyGraph, TopologyError> {
    let file: TopologyFile = serde_json::from_str(text)?;
    let services = file.services.into_iter().map(Into::into).collect();
    Ok(DependencyGraph::build(services, &file.requires)?)
}

/// Load and validate a topology file.
pub fn load_topology(path: impl AsRef<Path>) -> Result<DependencyGraph, TopologyError> {
    let text = std::fs::read_to_string(path)?;
    parse_topology(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_shape() {
        let text = r#"{
            "services": [
                {"id": "A", "probe_address": "127.0.0.1:7001", "probe_path": "/health"},
                {"id": "B", "probe_address": "127.0.0.1:7002"}
            ],
            "requires": [["B", "A"]]
        }"#;
        let g = parse_topology(text).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.descriptor("B").unwrap().probe_path, "/health");
    }

    #[test]
    fn duplicate_id_rejected() {
        let text = r#"{"services":[
            {"id":"A","probe_address":"h:1"},
            {"id":"A","probe_address":"h:2"}
        ]}"#;
        let err = parse_topology(text).unwrap_err();
        assert!(matches!(err, TopologyError::Graph(CoreError::DuplicateServiceId(_))));
    }

    #[test]
    fn bad_id_charset_rejected() {
        let text = r#"{"services":[{"id":"a b","probe_address":"h:1"}]}"#;
        let err = parse_topology(text).unwrap_err();
        assert!(matches!(err, TopologyError::Graph(CoreError::InvalidServiceId(_))));
    }

    #[test]
    fn malformed_json_error_names_the_line() {
        let text = "{\n  \"services\": [\n    {\"id\": }\n  ]\n}";
        let err = parse_topology(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "got: {msg}");
    }

    #[test]
    fn edge_to_undeclared_service_rejected() {
        let text = r#"{"services":[{"id":"B","probe_address":"h:1"}],"requires":[["B","A"]]}"#;
        let err = parse_topology(text).unwrap_err();
        assert!(matches!(err, TopologyError::Graph(CoreError::UnknownService(_))));
    }
}
