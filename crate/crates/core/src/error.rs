use thiserror::Error;

/// Errors produced by the kink library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("no finite-energy kink joins vacua {m} and {n}: only adjacent vacua (|m - n| = 1) are connected")]
    NonAdjacentVacua { m: i64, n: i64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
