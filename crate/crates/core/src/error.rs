use thiserror::Error;

/// Why an improvement step could not be applied.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepViolation {
    #[error("index M must be at least 1")]
    ZeroIndex,
    #[error("s_M(K) = s_{{M+1}}(K) at M = {0}; averaging cannot increase the pairing")]
    EntriesNotSeparated(usize),
    #[error("s_{{M+1}}(T) = 0 at M = {0}; ratio condition undefined")]
    ZeroSingularValue(usize),
    #[error("pi_M / pi_(M+1) <= s_M / s_(M+1) at M = {0}")]
    RatioCondition(usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("sequence is not nonincreasing")]
    Unsorted,
    #[error("sequence must have finite support (zero tail)")]
    NotFiniteSupport,
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("dual norm may be infinite; weight not equivalent to maximal")]
    DualNormMayBeInfinite,
    #[error("operation requires exact tail families: {0}")]
    NotExact(&'static str),
    #[error("improvement step precondition failed: {0}")]
    Step(#[from] StepViolation),
    #[error("ratio condition fails at n = {index}")]
    RatioConditionFails { index: usize },
    #[error("limit(s) = 0; compact source admits no certificate")]
    CompactLimit,
    #[error("source is compact; no adversary exists")]
    CompactSource,
    #[error("invalid alpha schedule: {0}")]
    InvalidSchedule(String),
    #[error("matrix is not an orthogonal projection")]
    NotProjection,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
