use thiserror::Error;

/// Errors from constructing or querying the domain model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("unknown service `{0}`")]
    UnknownService(String),
    #[error("service `{0}` cannot depend on itself")]
    SelfDependency(String),
    #[error("duplicate service id `{0}`")]
    DuplicateServiceId(String),
    #[error("invalid service id `{0}`: must be non-empty and match [a-zA-Z0-9._-]+")]
    InvalidServiceId(String),
    #[error("empty input")]
    EmptyInput,
}
