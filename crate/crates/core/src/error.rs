use thiserror::Error;

/// Errors produced by the geometry, integration and orchestration layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "unsupported kappa {0}: an orthogonal family I, J_1, .., J_(k-1) of skew \
         anticommuting k x k matrices exists only for k in {{1, 2, 4, 8}} (Hurwitz-Radon)"
    )]
    UnsupportedKappa(usize),

    #[error("matrix is not orthogonal: max |S^T S - I| = {0:e}")]
    NotOrthogonal(f64),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gauge is not positive and finite at {point:?} (value {value})")]
    DegenerateGauge { point: Vec<f64>, value: f64 },

    #[error("boundary crossing not found along ray from {origin:?} in direction {direction:?}")]
    RayNotConverged {
        origin: Vec<f64>,
        direction: Vec<f64>,
    },

    #[error("exponent q = {0} lies within 1e-3 of an even integer; use the integer route")]
    NearEvenInteger(f64),

    #[error("unsupported case kappa = {kappa}, n = {n}: {reason}")]
    UnsupportedCase {
        kappa: usize,
        n: usize,
        reason: String,
    },

    #[error(
        "constancy of the transform on the sphere of the perpendicular subspace is \
         unverified for kappa = {0}; run the constancy probe first"
    )]
    ConstancyUnverified(usize),

    #[error("no negative value of the transform found; the body may be an intersection body")]
    NoNegativityFound,

    #[error("perturbation destroys the star property; largest admissible epsilon is {max_epsilon:e}")]
    StarPropertyViolated { max_epsilon: f64 },

    #[error("degenerate perturbation profile: no epsilon above {0:e} keeps the body convex")]
    DegenerateProfile(f64),

    #[error("counterexample construction failed: {0}")]
    Construction(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
