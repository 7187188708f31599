//! Shared domain model for the health check system.
//!
//! Everything in this crate is plain data plus pure functions: service
//! descriptors, the dependency graph with its root-cause classification,
//! health status algebra, metric samples, events and issues, and the wire
//! schema agents use to ship batches to the receiver. All types are
//! immutable after construction and safe to share across threads.

mod error;
mod graph;
mod issue;
mod metric;
mod service;
mod status;
pub mod topology;
pub mod wire;

pub use error::CoreError;
pub use graph::{DependencyGraph, RootCauseReport};
pub use issue::{issue_id, Evidence, Issue, IssueCategory, Severity};
pub use metric::{Event, EventType, InvalidRecord, MetricKind, MetricSample};
pub use service::{validate_service_id, ServiceDescriptor};
pub use status::{worst_status, HealthStatus};
