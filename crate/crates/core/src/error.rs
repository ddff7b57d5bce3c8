use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsvError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("state norm {norm} deviates from 1")]
    NotNormalized { norm: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("ensemble rank {rank} exceeds the dense eigensolve limit {limit}")]
    RankLimitExceeded { rank: usize, limit: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("parameter `{name}` out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("no eigenvalue of magnitude 1/kappa in the spectrum")]
    NoMinimalEigenvalue,

    #[error("overlap <b'|b> has imaginary part {0:e}; pair was not built by build_pair")]
    ComplexOverlap(f64),

    #[error("dimension {n} exceeds the dense eigensolve budget {budget}")]
    OverBudget { n: usize, budget: usize },

    #[error("spectral gap {0:e} is below the zero threshold")]
    VanishingGap(f64),

    #[error("solver error {0} is outside the analysed regime (<= 1/100)")]
    SolverErrorTooLarge(f64),

    #[error("invalid instance record: {0}")]
    InvalidRecord(String),
}

pub type Result<T, E = QsvError> = std::result::Result<T, E>;

pub(crate) fn out_of_range(name: &'static str, detail: impl Into<String>) -> QsvError {
    QsvError::OutOfRange {
        name,
        detail: detail.into(),
    }
}
