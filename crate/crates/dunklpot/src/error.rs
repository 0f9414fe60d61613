//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),
    #[error("gamma function overflows at x = {0}")]
    GammaOverflow(f64),
    #[error("unsupported Bessel order {0} (must be >= -1/2)")]
    UnsupportedOrder(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature did not converge (best estimate {best}, error estimate {error_estimate}, {evaluations} evaluations)")]
    NonConvergence {
        best: f64,
        error_estimate: f64,
        evaluations: usize,
    },
    #[error("integrand envelope grows beyond s = {0}")]
    EnvelopeViolation(f64),
    #[error("oscillatory integral did not converge at r = {radius}: {source}")]
    TransformFailure {
        radius: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("non-finite sample at r = {0}")]
    NonFiniteSample(f64),
    #[error("profile is not integrable: {0}")]
    NonIntegrable(String),
    #[error("weighted norm diverges: {0}")]
    DivergentNorm(String),
    #[error("unsupported beta {0} for the closed-form kernel (only 1 and 2)")]
    UnsupportedBeta(f64),
    #[error("alpha = {alpha} outside the admissible range (0, {limit})")]
    AlphaOutOfRange { alpha: f64, limit: f64 },
    #[error("|F| changes sign inside the fitting window")]
    SignChange,
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("singular moment system (repeated points?)")]
    SingularSystem,
    #[error("measure has vanishing order {have}, but {need} is required")]
    InsufficientVanishingMoments { have: usize, need: usize },
    #[error("kappa of the measure vanishes")]
    ZeroKappa,
    #[error("invalid wavelet measure: {0}")]
    InvalidMeasure(String),
    #[error("smoothness ratio diverges toward the origin ({0})")]
    Divergence(String),
    #[error("error does not decrease along the eps grid")]
    InsufficientDecay,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by the numerical engine rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::EnvelopeViolation(_)
                | Error::TransformFailure { .. }
                | Error::GammaOverflow(_)
                | Error::Divergence(_)
                | Error::InsufficientDecay
                | Error::NonIntegrable(_)
                | Error::DivergentNorm(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
