use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not square-free")]
    NotSquareFree(u64),
    #[error("prime {0} is a bad prime for this curve")]
    BadPrime(u64),
    #[error("singular Weierstrass equation")]
    Singular,
    #[error("invalid curve data: {0}")]
    InvalidCurve(String),
    #[error("gcd({0}, N) != 1")]
    NotCoprime(u64),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("eigenspace isolation failed: {0}")]
    Isolation(String),
    #[error("period normalization failed: {0}")]
    Normalization(String),
    #[error("numerical evaluation failed: {0}")]
    Numerical(String),
    #[error("element is not in the required ideal: {0}")]
    NotMember(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cache error: {0}")]
    Cache(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
