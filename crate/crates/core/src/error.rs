use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("subspace is not an ideal")]
    NotAnIdeal,
    #[error("dimension {n} is too small for {what}")]
    DimensionTooSmall { what: &'static str, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("matrix is not a derivation")]
    NotADerivation,
    #[error("automorphism parameters are singular (beta * kappa = 0)")]
    SingularParams,
    #[error("the derivation coset is nilpotent; it cannot define a solvable extension")]
    NilpotentCoset,
    #[error("codimension {0} is not supported (only 1 and 2)")]
    UnsupportedCodimension(usize),
    #[error("index {index} out of range {range}")]
    IndexOutOfRange { index: usize, range: String },
    #[error("no invariants are listed for {0}")]
    NoInvariantsListed(String),
    #[error("variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("point is not admissible: {0}")]
    InadmissiblePoint(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
