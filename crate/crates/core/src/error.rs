use thiserror::Error;

use crate::bounds::AdmissibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed signature: {0}")]
    InvalidSignature(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace {0} differs from 1")]
    TraceNotUnit(f64),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid bipartition: {0}")]
    InvalidSplit(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("rank {rank} exceeds ensemble budget {budget}")]
    RankExceedsBudget { rank: usize, budget: usize },

    #[error("bound preconditions not met: {}", .0.failures().join("; "))]
    Precondition(AdmissibilityReport),

    #[error("chain step {step}: {reason}")]
    ChainStep { step: usize, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
