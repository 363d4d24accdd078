use thiserror::Error;

/// Errors produced by the solver toolkit.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("empty input vector")]
    EmptyInput,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate index {0} in index set")]
    DuplicateIndex(usize),

    #[error("invalid simplex point: {0}")]
    InvalidSimplexPoint(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid field `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },

    #[error("enumeration guard exceeded: size {size} > guard {guard}")]
    GuardExceeded { size: usize, guard: usize },

    #[error("no feasible candidate survived enumeration (implementation bug)")]
    NoCandidate,

    #[error("line search called with a zero direction")]
    ZeroDirection,

    #[error("line search called with a non-descent direction (d'p = {0})")]
    NonDescent(f64),

    #[error("unbounded descent along a direction (impossible on the simplex)")]
    UnboundedDescent,

    #[error("empty free variable set")]
    EmptyFreeSet,
}

pub type Result<T> = std::result::Result<T, SolverError>;
