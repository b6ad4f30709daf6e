use thiserror::Error;

/// Errors raised by the library. Parameter violations found by
/// [`crate::params::validate`] are data and are returned as a list instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{field}`: {rule}")]
    InvalidParameter { field: &'static str, rule: String },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("components have unequal widths ({0} vs {1})")]
    UnequalWidths(f64, f64),

    #[error("superposition has no components")]
    EmptySuperposition,

    #[error("pre- and postselected states are orthogonal; weak value undefined")]
    OrthogonalPrePost,

    #[error("postselection succeeds with probability zero")]
    ZeroSuccess,

    #[error("quadrature grid rejected: {0}")]
    GridTooCoarse(String),

    #[error("numerical integration did not converge (error estimate {estimate:e}, tolerance {tolerance:e})")]
    IntegrationFailed { estimate: f64, tolerance: f64 },

    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    #[error("probability must be in (0, 1], got {0}")]
    ZeroProbability(f64),

    #[error("trial budget of {trials} exhausted with z = {z:.3}")]
    BudgetExhausted { trials: u64, z: f64 },

    #[error("conditioning accepted no trials out of {0}")]
    NothingAccepted(u64),

    #[error("unknown preset `{0}` (expected one of: paper-A, paper-B)")]
    UnknownPreset(String),

    #[error("parameter document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
