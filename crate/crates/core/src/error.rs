//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by matrix validation, point construction, bounds, search and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is empty or not square")]
    NotSquare,
    #[error("diagonal entry ({0},{0}) is {1}, expected 2")]
    Diagonal(usize, i64),
    #[error("off-diagonal entry ({0},{1}) is positive ({2})")]
    PositiveOffDiagonal(usize, usize, i64),
    #[error("zero pattern is asymmetric at ({0},{1})")]
    ZeroPatternAsymmetry(usize, usize),
    #[error("rank {0} exceeds the principal-minor guard limit {1}")]
    RankGuard(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not of finite type")]
    NotFiniteType,
    #[error("unknown Dynkin type {0:?}")]
    UnknownType(String),
    #[error("vector length {got} does not match rank {expected}")]
    Length { expected: usize, got: usize },
    #[error("nonpositive entry in point")]
    Nonpositive,
    #[error("equations {0:?} are violated (1-based)")]
    Residue(Vec<usize>),
    #[error("knitting failed: non-exact division")]
    KnitFailure,
    #[error("translation period violated: {0}")]
    Period(String),
    #[error("node {node} has degree {degree}, expected 1")]
    NodeDegree { node: usize, degree: usize },
    #[error("parameters outside the finite range: {0}")]
    Parameters(String),
    #[error("stream recurrence produced a non-exact division at index {0}")]
    StreamDivision(usize),
    #[error("checkpoint digest mismatch: file has {found}, configuration has {expected}")]
    DigestMismatch { expected: String, found: String },
    #[error("corrupt checkpoint record: {0}")]
    CorruptCheckpoint(String),
    #[error("node budget exhausted after {nodes} nodes; checkpoint at {path:?}")]
    BudgetExhausted { nodes: u64, path: Option<String> },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
