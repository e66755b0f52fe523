use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    /// An operator mapped the state to the zero vector (or below the
    /// numerical floor), so no normalized output exists.
    #[error("zero state: {0}")]
    ZeroState(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error(
        "cutoff overflow: tail mass {tail:e} still above {tail_tol:e} at max cutoff {max_cutoff}"
    )]
    CutoffOverflow {
        max_cutoff: usize,
        tail: f64,
        tail_tol: f64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no real root for the vacuum coefficient: alpha={alpha}, eta={eta} (need eta <= 1 + eta*exp(-alpha^2))")]
    NoRealRoot { alpha: f64, eta: f64 },

    #[error("unsupported spec: {0}")]
    UnsupportedSpec(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = FockError> = std::result::Result<T, E>;

/// Failure of one step in an operator chain. `step` is 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {step}: {error}")]
pub struct StepError {
    pub step: usize,
    #[source]
    pub error: FockError,
}
