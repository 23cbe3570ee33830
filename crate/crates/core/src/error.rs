use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atomic measure has no Lebesgue density")]
    AtomicHasNoDensity,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("adaptive quadrature did not converge on [{lo}, {hi}] (depth limit {depth})")]
    NonIntegrable { lo: f64, hi: f64, depth: usize },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("{op}: no bracketing sign change ({detail})")]
    BracketFailure { op: &'static str, detail: String },
    #[error("V-set is empty: no absolutely continuous part detected in the search window")]
    EmptyVSet,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("grid underflow: {0}")]
    GridUnderflow(String),
    #[error("search window too narrow: {0}")]
    WindowTooNarrow(String),
    #[error("index {index} out of range (valid: 1..={max})")]
    IndexOutOfRange { index: usize, max: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
