use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{operation} does not support {model}: {reason}")]
    UnsupportedModel {
        operation: &'static str,
        model: String,
        reason: &'static str,
    },

    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    /// A true (non-removable) pole. `index` is the resonance number m in ωτ = mπ.
    #[error("pole of the susceptibility at omega*tau = {index}*pi (omega = {omega})")]
    Pole { index: i64, omega: f64 },

    #[error("vanishing cavity denominator at omega = {omega}")]
    VanishingDenominator { omega: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Accuracy { achieved: f64, requested: f64 },

    #[error("consistency check `{check}` failed: relative gap {gap:e} exceeds {tolerance:e}")]
    Consistency {
        check: &'static str,
        gap: f64,
        tolerance: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
