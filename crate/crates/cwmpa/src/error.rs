//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by state construction and the amplification pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state, ket, or coefficient pair that must be normalized is not.
    #[error("normalization error in {context}: squared norm {norm_sqr:e}")]
    Normalization {
        context: &'static str,
        norm_sqr: f64,
    },

    /// Index out of range or mismatched dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// The pointer lost one polarization component; the signal survives only
    /// as a global phase and cannot be extracted.
    #[error("phase lost: a pointer amplitude fell below threshold; the post-selection sits at the forbidden point")]
    PhaseLost,

    /// Post-selection exactly orthogonal to the no-signal state.
    #[error("forbidden post-selection at {place}: the signal degenerates to an unobservable global phase")]
    ForbiddenDelta { place: String },

    /// An amplification factor was requested for a vanishing signal.
    #[error("degenerate signal: amplification factor is undefined at theta = 0")]
    DegenerateSignal,

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration value.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn forbidden(place: impl Into<String>) -> Self {
        Error::ForbiddenDelta {
            place: place.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
