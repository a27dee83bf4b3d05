use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension overflow: n = {0} exceeds the supported maximum of {max}", max = crate::gf2::MAX_LOG_LEN)]
    DimensionOverflow(usize),

    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid variant: {0}")]
    InvalidVariant(String),

    #[error("matrix is singular over GF(2)")]
    Singular,

    #[error("matrix is not a permutation matrix")]
    NotPermutation,

    #[error("group has only {available} eligible members, {requested} requested")]
    GroupTooSmall { requested: u128, available: u128 },

    #[error("constraint matrix is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("permutation #{0} does not leave the constraint invariant")]
    UnstablePermutation(usize),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 3 for resource caps, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceCap(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
