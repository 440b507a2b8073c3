use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigenvalues are not simple: |{a} - {b}| is within the gap tolerance")]
    NotSimple { a: String, b: String },

    #[error("eigensolve failed: {0}")]
    EigensolveFailed(String),

    #[error("restriction onto an empty support")]
    EmptySupport,

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("problem size {size} exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid set cover instance: {0}")]
    InvalidInstance(String),

    /// 0-based; messages number eigenvectors and states from 1.
    #[error("eigenvector v{} has an all-zero structural pattern", .0 + 1)]
    ZeroPattern(usize),

    #[error("input structure is infeasible: eigenvector v{} has no nonzero entry on the support", .0 + 1)]
    Infeasible(usize),

    #[error("realization repair failed: {0}")]
    RepairFailed(String),

    #[error("realized input is not certified controllable: {reason}")]
    VerificationFailed {
        reason: String,
        solution: Box<crate::mcp::McpSolution>,
    },

    #[error("invalid eigenbasis: {0}")]
    InvalidEigenbasis(String),

    #[error(
        "diagonal entry ({i}, {i}) is zero; only matrices with a full diagonal of self-loops are supported",
        i = .0 + 1
    )]
    MissingSelfLoops(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
