use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: zero or non-positive pivot at column {column}")]
    SingularMatrix { column: usize },

    #[error("input must be strictly positive")]
    NonPositiveInput,

    #[error("iterate has a non-positive entry at index {index}")]
    NonPositiveIterate { index: usize },

    #[error("ray leaves the domain at index {index}")]
    RayLeavesDomain { index: usize },

    #[error("damped Newton step left the positive orthant at index {index}")]
    DomainExit { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("row {row} is zero")]
    ZeroRow { row: usize },

    #[error("row {row} does not have an integral Euclidean norm")]
    NotNormalizable { row: usize },

    #[error("operation requires an exact-mode iterate")]
    ExactModeOnly,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("lifted solution failed the exact check on the source instance")]
    LiftCheckFailed,

    #[error("solver stopped after {steps} steps without a solution")]
    StepBudgetExceeded { steps: u64 },

    #[error("floating-point solve failed numerically")]
    NumericFailure,

    #[error("purification stopped at slack {slack} > 0; the feasibility assumption does not hold")]
    PurificationFailed { slack: String },

    #[error("ray is not blocked by any constraint")]
    UnboundedRay,

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("perceptron did not converge within {cap} steps")]
    CapExceeded { cap: u64 },

    #[error("generator rejected {draws} candidate rows; margin too large for the bit budget")]
    RejectionBudgetExceeded { draws: u64 },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("line {line}: expected {expected} entries, found {found}")]
    RowLengthMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: `{token}` is not an integer")]
    NonIntegerEntry { line: usize, token: String },

    #[error("line {line}: malformed metadata: {message}")]
    MalformedMeta { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
