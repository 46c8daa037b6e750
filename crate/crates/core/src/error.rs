use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not unitary (Frobenius deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("nonzero amplitude on label {label} outside the oracle domain [1, {size}]")]
    OutsideDomain { label: usize, size: usize },
    #[error("register `{register}` of dimension {dim} cannot hold the encoding of {size}")]
    RegisterTooNarrow { register: String, dim: usize, size: usize },
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("zero marginal mass on register `{0}`")]
    ZeroMarginal(String),
    #[error("iterative eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("dimension {dim} exceeds the dense cutoff {cutoff}")]
    CutoffExceeded { dim: usize, cutoff: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("inconsistent transcript: {0}")]
    Transcript(String),
    #[error("slack conditions violated: {0}")]
    SlackViolated(String),
    #[error("ancilla is not a fixed point of the controlled unitary (deviation {deviation:.3e})")]
    NotFixedPoint { deviation: f64 },
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("entry {value} does not fit the {width}-bit encoding")]
    EncodingOverflow { value: String, width: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
