use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix has row rank {rank} but {rows} rows; call reduce_full_rank first")]
    RankDeficient { rank: usize, rows: usize },
    #[error("matrix is not square and symmetric")]
    NotSymmetric,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{name} limit exceeded: {value} > {limit}")]
    Limit {
        name: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("not quasitransversal at x={x} y={y}: {reason}")]
    NotQuasitransversal { x: String, y: String, reason: String },
    #[error("not Clifford-equivalent at x={x}: {reason}")]
    NotEquivalent { x: String, reason: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal verification failed: {0}")]
    Internal(String),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("target error rate {target:e} unreachable within {rounds} rounds")]
    Unreachable { target: f64, rounds: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
