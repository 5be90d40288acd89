use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically singular (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry in matrix data")]
    NonFinite,
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("eigenvalue iteration did not converge")]
    EigenNotConverged,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no grid cell brackets the requested level")]
    EmptyLevel,
    #[error("search window does not bracket the level 1/epsilon")]
    NotBracketed,
    #[error("curve is degenerate (fewer than three non-collinear points)")]
    DegenerateCurve,
    #[error("curve is not closed")]
    CurveOpen,
    #[error("contour does not enclose the pole at {re}{im:+}i")]
    NotEnclosing { re: f64, im: f64 },
    #[error("resolvent norm unbounded in the right half plane (value {0:e})")]
    Unbounded(f64),
    #[error("quadrature failed to reach tolerance within {0} panels")]
    QuadratureFail(usize),
    #[error("semicircle radius factor must exceed 1, got {0}")]
    InvalidA(f64),
    #[error("resolvent decay exponent {0} does not exceed 1")]
    DecayTooSlow(f64),
    #[error("system has a pole on the imaginary axis near omega = {0}")]
    NotInputOutputStable(f64),
    #[error("transient trace still growing at the horizon t = {0}")]
    NotConverged(f64),
    #[error("integrand tail exceeds tolerance at the horizon (tail estimate {0:e})")]
    HorizonTooShort(f64),
    #[error("system too large for the dense path ({0} states)")]
    TooLarge(usize),
    #[error("bound ordering violated: lower {lower:e} exceeds upper {upper:e} ({which})")]
    Inconsistent {
        lower: f64,
        upper: f64,
        which: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
