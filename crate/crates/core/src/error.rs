use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field size {0} exceeds the table budget of 2^16")]
    SizeExceeded(u64),
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("GF({small}) is not a subfield of GF({big})")]
    NotASubfield { small: u32, big: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("element index {0} is out of range for the field")]
    ElementOutOfRange(u32),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Lawrence sequence is empty")]
    EmptySequence,
    #[error("Lawrence sequence is not nondecreasing")]
    NotNondecreasing,
    #[error("Lawrence sequence has a non-positive entry")]
    NonPositiveEntry,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("invalid polytope description: {0}")]
    InvalidPolytope(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("polytope does not fit in [0, {max_exponent}]^m (coordinate {found})")]
    PolytopeTooLargeForField { max_exponent: u32, found: i64 },
    #[error("tuple has {found} entries, expected {expected}")]
    WrongTupleSize { expected: usize, found: usize },

    #[error("realized polytope does not fit the field: {0}")]
    DoesNotFit(String),
    #[error("dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(usize),
    #[error("polytope has {found} lattice points, need at least {needed}")]
    TooFewLatticePoints { found: usize, needed: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
