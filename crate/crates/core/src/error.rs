//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("eigenvalue iteration exhausted its budget")]
    NoConvergence,
    #[error("matrix is numerically singular")]
    Singular,
    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("tau must be nonzero")]
    ZeroTau,
    #[error("tau must lie on the unit circle (|tau| = {modulus})")]
    OffCircle { modulus: f64 },
    #[error("coupling constant must be 1 (got {c})")]
    CouplingNotOne { c: f64 },
    #[error("cos(kappa1) and cos(kappa2) must differ")]
    DegenerateAngles,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("operator does not meet the detector hypothesis: {0}")]
    HypothesisNotMet(String),
    #[error("sample count {got} below minimum {min}")]
    InvalidResolution { got: usize, min: usize },
    #[error("invalid extremal problem: {0}")]
    InvalidProblem(String),
    #[error("operator validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
