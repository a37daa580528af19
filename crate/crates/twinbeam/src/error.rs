use thiserror::Error;

/// Errors produced by simulation, estimation, and scenario code.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a value outside its domain.
    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Sampling a mode set on a grid whose step aliases the spectrum.
    /// Baseband sampling requires `step * max|offset| < pi`.
    #[error("time step {step} aliases the spectrum (step * max|offset| = {product} >= pi)")]
    Aliased { step: f64, product: f64 },

    /// The time step cannot resolve the requested coherence time.
    #[error("time step {step} too coarse for coherence time {coherence_time} (need step < coherence_time / 5)")]
    StepTooCoarse { step: f64, coherence_time: f64 },

    /// Two series that must share a time grid do not.
    #[error("time grids differ: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    /// A correlation lag is not an integer number of grid steps.
    #[error("lag {lag} is not a multiple of the grid step {step}")]
    LagOffGrid { lag: f64, step: f64 },

    /// A correlation lag leaves no overlap between the two series.
    #[error("lag {lag} exceeds the {window}-long time window")]
    LagBeyondWindow { lag: f64, window: f64 },

    /// The least-squares design matrix does not determine all coefficients.
    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    /// A mode index was out of range.
    #[error("mode index {index} out of range for {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    /// Too much pulse energy sits at the edges of the time window, so
    /// measured widths would be truncation artifacts.
    #[error("{fraction:.2}% of pulse energy lies in the outer 10% of the window (limit 1%); widen the grid")]
    WindowSpill { fraction: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for guards that reject a numerically unsafe configuration
    /// (aliasing, unresolved coherence, truncated windows) rather than a
    /// malformed one.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::Aliased { .. }
                | Error::StepTooCoarse { .. }
                | Error::LagBeyondWindow { .. }
                | Error::WindowSpill { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
