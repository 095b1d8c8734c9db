use alloc::string::String;

/// Failure modes shared by every stage of the estimation pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("estimator needs K <= M - 1, got K = {k} with contiguous aperture M = {m}")]
    Capability { k: usize, m: usize },

    #[error("degenerate ESPRIT eigenvalue |z| = {modulus:e}; frequency undefined")]
    DegenerateEigenvalue { modulus: f64 },

    #[error("shift-invariance block has rank {rank} < K = {k}")]
    RankDeficient { rank: usize, k: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
