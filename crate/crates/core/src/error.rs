use thiserror::Error;

/// Errors raised by state construction, operator algebra and the survival
/// probability evaluators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("photon number {n} exceeds the Fock cutoff {n_max}")]
    CutoffViolation { n: usize, n_max: usize },

    #[error("cutoff {n_max} leaves a truncation tail of {tail:.3e}; the state needs n_max >= {required}")]
    InsufficientCutoff { n_max: usize, tail: f64, required: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max |M - M^dag| = {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("state is not unit-norm: |norm - 1| = {defect:.3e}")]
    NotNormalized { defect: f64 },

    #[error("requires the resonant case nu = omega, got nu = {nu}, omega = {omega}")]
    OffResonance { nu: f64, omega: f64 },

    #[error("invalid model parameters: {reason}")]
    InvalidParams { reason: String },

    #[error("eigenstate coefficients degenerate at n = {n}: mu = 0 with eta <= 0")]
    DegenerateBranch { n: usize },

    #[error("field state carries weight {tail:.3e} above n = {interior}; raise n_max")]
    UnsupportedFieldTail { tail: f64, interior: usize },

    #[error("invalid time grid: {reason}")]
    InvalidGrid { reason: String },

    #[error("no models requested")]
    EmptyModelSet,

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
