use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("logit vector must be nonempty")]
    EmptyLogits,
    #[error("logit at index {index} is not finite ({value})")]
    NonFiniteLogit { index: usize, value: f64 },
    #[error("alpha must be finite and >= 1, got {0}")]
    InvalidAlpha(f64),
    #[error("epsilon must lie in [0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("epsilon = 1 makes lambda = eps / (1 - eps) diverge")]
    DegenerateEpsilon,
    #[error("not a simplex point: {0}")]
    NotOnSimplex(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("index {index} out of range for vocabulary of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("bisection residual {residual:e} above tolerance after {iterations} iterations")]
    IterationLimitExceeded { residual: f64, iterations: usize },
    #[error("token index {0} is outside the vocabulary")]
    UnknownToken(usize),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("total reference length is zero")]
    EmptyReferences,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search budget of {0} expansions exhausted before any hypothesis completed")]
    BudgetExceeded(usize),
    #[error("no hypothesis completed within {max_len} steps")]
    NoCompleteHypothesis {
        max_len: usize,
        best_open: crate::decoding::Hypothesis,
    },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
