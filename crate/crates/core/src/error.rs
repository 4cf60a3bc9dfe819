use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("state is not unit-norm (norm² = {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation from identity {0:e})")]
    NotUnitary(f64),

    #[error("projector basis is not orthonormal")]
    NonOrthonormalBasis,

    #[error("projector needs 1 to 3 basis vectors, got {0}")]
    ProjectorRank(usize),

    /// The measurement landed on a branch whose residual vector is numerically zero.
    #[error("impossible measurement branch (residual norm² {0:e})")]
    ImpossibleBranch(f64),

    #[error("length mismatch: bank has {bank} registers, key/message has {key}")]
    LengthMismatch { bank: usize, key: usize },

    #[error("index {index} out of range for bank of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("invalid bit character {0:?}")]
    InvalidBit(char),

    #[error("angle {0} outside [0, 2π)")]
    AngleOutOfRange(f64),

    #[error("auth key entry {index} violates minimum angle separation ({separation} < {min})")]
    AngleSeparation {
        index: usize,
        separation: f64,
        min: f64,
    },

    #[error("auth key has already signed a message")]
    KeyReused,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
