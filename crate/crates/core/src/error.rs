use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state vector must have at least one amplitude")]
    EmptyState,

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("matrix is not Hermitian (max entrywise deviation {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("impossible outcome")]
    ImpossibleOutcome,

    #[error("outcome probabilities sum to {0}, which deviates from 1 by more than 1e-9")]
    ProbabilityDrift(f64),

    #[error("unknown outcome label `{0}`")]
    UnknownOutcome(String),

    #[error("event index {index} out of range for a chain of {len} events")]
    EventIndex { index: usize, len: usize },

    #[error("post-selection event and target event must differ (both are {0})")]
    SameEvent(usize),

    #[error("empty post-selected ensemble")]
    EmptyPostSelection,

    #[error("post-selection unreachable through this measurement")]
    PostSelectionUnreachable,

    #[error("weak value undefined at orthogonal post-selection")]
    WeakValueUndefined,

    #[error("invalid pointer model: {0}")]
    InvalidPointerModel(String),

    #[error("unknown scenario `{name}`; valid names: {valid}")]
    UnknownScenario { name: String, valid: String },

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
