use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid structure constants: {0}")]
    InvalidAlgebra(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    #[error("metric restricted to the kernel of the anchor is degenerate (Gram determinant {gram_det:e})")]
    DegenerateRestriction { gram_det: f64 },

    #[error("leaf rank {rank} is too small (need at least {required})")]
    RankDeficient { rank: usize, required: usize },

    #[error("point is not regular: rank {rank} at the point, {neighbor_rank} nearby")]
    NotRegular { rank: usize, neighbor_rank: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
