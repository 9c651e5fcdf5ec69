//! Error taxonomy shared by every module.
//!
//! Variants map onto the CLI exit codes: configuration/geometry problems are
//! recoverable user errors, `Convergence` signals that a regularized quantity
//! failed its paired-epsilon check, and the remaining variants are internal.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index error: {0}")]
    IndexError(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("regularization required: {0}")]
    RegularizationRequired(String),
    #[error("not a gap: {0}")]
    NotAGap(String),
    #[error("pole proximity: {0}")]
    PoleProximity(String),
    #[error("convergence: {0}")]
    Convergence(String),
    #[error("stale root: {0}")]
    StaleRoot(String),
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("not decoherence-free: {0}")]
    NotDecoherenceFree(String),
    #[error("degenerate emitter: {0}")]
    DegenerateEmitter(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("linear algebra backend: {0}")]
    Lapack(String),
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
