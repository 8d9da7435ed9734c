use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator index {index} is outside the alphabet of rank {rank}")]
    AlphabetMismatch { index: usize, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("bad token `{0}` (expected xN or XN)")]
    BadToken(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("alphabet rank must be at least 1")]
    EmptyAlphabet,

    #[error("vertex {vertex} is not a vertex of a graph with {count} vertices")]
    BadVertex { vertex: usize, count: usize },

    #[error("element does not belong to this extension: {0}")]
    SpecMismatch(String),

    #[error("arity mismatch: {0}")]
    Arity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
