use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("knot {coord} coordinates must be strictly increasing (violated near index {index})")]
    NonMonotone { coord: &'static str, index: usize },

    #[error("CDF knots must start at ({lo}, 0) and end at ({hi}, 1)")]
    BadEndpoints { lo: f64, hi: f64 },

    #[error("a piecewise-linear CDF needs at least 2 knots, got {0}")]
    TooFewKnots(usize),

    #[error("value {0} is outside the support [0, 1]")]
    OutOfSupport(f64),

    #[error("probability {0} is outside [0, 1]")]
    OutOfRange(f64),

    #[error("invalid range: lower bound {lo} exceeds upper bound {hi}")]
    BadRange { lo: f64, hi: f64 },

    #[error("cannot condition on the top of the support (x = 1)")]
    DegenerateTruncation,

    #[error("support must have positive width")]
    DegenerateSupport,

    #[error("lambda must lie strictly inside (0, 1), got {0}")]
    BadLambda(f64),

    #[error("ladder start must satisfy c < 1")]
    DegenerateStart,

    #[error("per-cost bounds require c < 1")]
    DegenerateCost,

    #[error("mixture weight must lie in [0, 1], got {0}")]
    BadAlpha(f64),

    #[error("unknown mechanism `{0}` (expected fixed, seller, buyer, mixture or fb)")]
    UnknownMechanism(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("property violation: {0}")]
    PropertyViolation(String),

    #[error("invalid document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
