use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("rank {rank} out of range for degree {n}")]
    RankOutOfRange { rank: u64, n: usize },
    #[error("no diameter-3 tree with r = {r}, t = {t} (both must be at least 2)")]
    BadTreeShape { r: usize, t: usize },
    #[error("component types need r == t (got r = {r}, t = {t})")]
    UnbalancedTree { r: usize, t: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid Johnson object: {0}")]
    Johnson(String),
    #[error("malformed certificate: {0}")]
    Certificate(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
