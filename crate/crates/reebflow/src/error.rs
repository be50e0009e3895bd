//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // --- Reeb vectors and the slice ---
    #[error("a Reeb vector needs at least 2 coefficients, got {len}")]
    BadDimension { len: usize },
    #[error("non-finite coefficient {value}")]
    NonFinite { value: f64 },
    #[error("cannot parse `{token}` as a decimal coefficient")]
    ParseCoeff { token: String },
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not on the unit sphere (|z| = {norm})")]
    NotUnitPoint { norm: f64 },
    #[error("vector is not in the Reeb cone (min coefficient {min_coeff})")]
    NotInCone { min_coeff: f64 },
    #[error("ray misses the slice: charge {charge} is not positive")]
    NonPositiveCharge { charge: f64 },
    #[error("direction is not tangent to the slice (charge {charge})")]
    NotTangent { charge: f64 },
    #[error("homothetic factor must be positive, got {lambda}")]
    BadHomothety { lambda: f64 },
    #[error("Reeb vector must lie on the slice (charge {charge}, level {level})")]
    NotOnSlice { charge: f64, level: f64 },

    // --- quadrature ---
    #[error(
        "integrand is {value:.3e} at simplex node {node:?}; \
             integrand diverges toward the cone boundary"
    )]
    SingularNode { node: Vec<f64>, value: f64 },
    #[error("Monte Carlo needs at least {min} samples, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error("min coefficient {min_coeff:.3e} is below the boundary guard {guard:.1e}")]
    BoundaryProximity { min_coeff: f64, guard: f64 },

    // --- flow / minimization ---
    #[error("flow start must be interior and on the slice: {reason}")]
    InvalidStart { reason: String },
    #[error("step failed at t = {t}: volume would not decrease after {halvings} halvings")]
    StepFailure { t: f64, halvings: u32 },
    #[error("boundary guard tripped at min coefficient {min_coeff:.3e}")]
    BoundaryGuardTrip { min_coeff: f64 },
    #[error(
        "Newton iteration did not converge after {iterations} iterations \
             (grad norm {grad_norm:.3e})"
    )]
    NewtonStalled { iterations: u32, grad_norm: f64 },

    // --- soliton ODE ---
    #[error("weights must be positive, got ({a0}, {a1})")]
    BadWeights { a0: f64, a1: f64 },
    #[error("no sign change for the potential slope in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("profile is not positive on the interior (phi({x}) = {phi})")]
    NonPositiveProfile { x: f64, phi: f64 },
    #[error("profile weights ({w0}, {w1}) do not match the Reeb vector {reeb}")]
    WeightMismatch { w0: f64, w1: f64, reeb: String },

    // --- entropy ---
    #[error("entropy datum violates the normalization: integral of e^-f is {integral}")]
    UnnormalizedDatum { integral: f64 },
    #[error("entropy for non-constant data is only implemented at n = 1, got n = {n}")]
    EntropyDimension { n: usize },

    // --- config / CLI ---
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{flag}: {message}")]
    Flag { flag: &'static str, message: String },
    #[error("report assertion failed: {0}")]
    ReportAssertion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
