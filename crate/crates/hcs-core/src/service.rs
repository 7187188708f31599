use serde::{Deserialize, Serialize};

use crate::CoreError;

/// One monitored service as declared in the topology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceDescriptor {
    /// Unique id, `[a-zA-Z0-9._-]+`.
    pub id: String,
    /// Human-facing name; defaults to the id.
    pub display_name: String,
    /// `host:port` the connectivity checker probes.
    pub probe_address: String,
    /// URL path of the health endpoint, e.g. `/health`.
    pub probe_path: String,
}

impl ServiceDescriptor {
    pub fn new(id: impl Into<String>, probe_address: impl Into<String>) -> Self {
        let id = id.into();
        ServiceDescriptor {
            display_name: id.clone(),
            id,
            probe_address: probe_address.into(),
            probe_path: "/health".to_string(),
        }
    }

    /// Base URL of the probe endpoint.
    pub fn probe_url(&self) -> String {
        format!("http://{}{}", self.probe_address, self.probe_path)
    }
}

/// Check the id charset rule: non-empty, `[a-zA-Z0-9._-]+`.
pub fn validate_service_id(id: &str) -> Result<(), CoreError> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    if ok {
        Ok(())
    } else {
        Err(CoreError::InvalidServiceId(id.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_ids() {
        for id in ["A", "review-d", "db_01", "svc.eu.2"] {
            assert!(validate_service_id(id).is_ok(), "{id}");
        }
    }

    #[test]
    fn invalid_ids() {
        for id in ["", "a b", "x/y", "ünicode", "a:b"] {
            assert!(validate_service_id(id).is_err(), "{id:?}");
        }
    }
}
