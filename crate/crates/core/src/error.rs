use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a partition: {0:?}")]
    NotAPartition(Vec<i64>),
    #[error("not a strictly decreasing Maya diagram above its tail")]
    NotAMayaDiagram,
    #[error("invalid representation request: {0}")]
    InvalidRepresentation(&'static str),
    #[error("Young construction produced rank {computed}, expected dimension {expected}")]
    RankMismatch { computed: usize, expected: usize },
    #[error("spectral parameter within {distance:e} of the pole at inhomogeneity {site}")]
    Pole { site: usize, distance: f64 },
    #[error("twist matrix is singular or of the wrong size")]
    InvalidTwist,
    #[error("size mismatch: {0}")]
    SizeMismatch(&'static str),
    #[error("degree {needed} exceeds truncation degree {max}")]
    DegreeOverflow { needed: i64, max: i64 },
    #[error("vector is not homogeneous in charge")]
    MixedCharge,
    #[error("argument outside the supported range: {0}")]
    OutOfRange(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
