use thiserror::Error;

/// Errors produced by system construction, evaluation and certificate fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time pair out of order: t = {t} must satisfy t >= s >= 0 with s = {s}")]
    TimeOrder { t: f64, s: f64 },

    #[error("negative time {0} outside the domain")]
    NegativeTime(f64),

    #[error("state point kind `{got}` incompatible with system expecting `{expected}`")]
    IncompatibleState {
        expected: &'static str,
        got: &'static str,
    },

    #[error("system is defined on integer times only, got t = {0}")]
    NonIntegerTime(f64),

    #[error("time {0} beyond the generated step range (max {1})")]
    BeyondStepRange(f64, u32),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty sample set: {0}")]
    EmptySamples(String),

    #[error("projector family rejected: {reason} (max residual {residual:.3e})")]
    ProjectorRejected { reason: String, residual: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("verdict not monotone across probed parameters: {0}")]
    NonMonotoneVerdict(String),

    #[error("unknown builtin fixture `{0}`")]
    UnknownBuiltin(String),

    #[error("system is already projected; restrict the unprojected system instead")]
    AlreadyProjected,

    #[error("matrix is singular, cannot invert")]
    SingularMatrix,
}

pub type Result<T> = std::result::Result<T, Error>;
