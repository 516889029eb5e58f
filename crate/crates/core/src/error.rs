use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three groups, see [`ErrorClass`]: malformed input,
/// mathematical refusal (the request is well formed but outside the domain
/// of the operation) and numerical failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("bodies {i} and {j} are at a singular distance (0 or pi)")]
    SingularPair { i: usize, j: usize },

    #[error("bodies {i} and {j} are antipodal or coincident (T_ij vanishes)")]
    AntipodalSingularity { i: usize, j: usize },

    #[error("inadmissible positions: {0}")]
    Inadmissible(String),

    #[error("operation requires case {expected}, positions are in case {found}")]
    WrongCase { expected: String, found: String },

    #[error("mass relation gives non-positive mass m = {m} for mu = {mu} (requires mu > {threshold})")]
    MassNonpositive { mu: f64, m: f64, threshold: f64 },

    #[error("linear system is singular (reciprocal condition {rcond:e})")]
    SingularSystem { rcond: f64 },

    #[error("configuration is not collinear symmetric: {0}")]
    NotCollinearSymmetric(String),

    #[error("sign pattern violated: {}", .0.join(", "))]
    SignAssertionFailed(Vec<String>),

    #[error("singularity reached at t = {t} between bodies {i} and {j}")]
    SingularityReached { t: f64, i: usize, j: usize },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("configuration cannot rotate rigidly: fitted omega^2 = {omega_sq}")]
    NegativeOmegaSquared { omega_sq: f64 },

    #[error("unknown lemma '{0}' (expected lema2, lemma5 or lemma4)")]
    UnknownLemma(String),
}

/// Coarse grouping of [`Error`] variants, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    BadInput,
    Refusal,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidInput(_) | Error::UnknownLemma(_) => ErrorClass::BadInput,
            Error::Inadmissible(_)
            | Error::WrongCase { .. }
            | Error::MassNonpositive { .. }
            | Error::NotCollinearSymmetric(_)
            | Error::SignAssertionFailed(_) => ErrorClass::Refusal,
            Error::SingularPair { .. }
            | Error::AntipodalSingularity { .. }
            | Error::SingularSystem { .. }
            | Error::SingularityReached { .. }
            | Error::StepSizeUnderflow { .. }
            | Error::NegativeOmegaSquared { .. } => ErrorClass::Numerical,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::SingularPair { .. } => "SingularPair",
            Error::AntipodalSingularity { .. } => "AntipodalSingularity",
            Error::Inadmissible(_) => "Inadmissible",
            Error::WrongCase { .. } => "WrongCase",
            Error::MassNonpositive { .. } => "MassNonpositive",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::NotCollinearSymmetric(_) => "NotCollinearSymmetric",
            Error::SignAssertionFailed(_) => "SignAssertionFailed",
            Error::SingularityReached { .. } => "SingularityReached",
            Error::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            Error::NegativeOmegaSquared { .. } => "NegativeOmegaSquared",
            Error::UnknownLemma(_) => "UnknownLemma",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
