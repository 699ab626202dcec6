//! Crate-wide error type.

/// Errors shared by every module of the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid size must be even and at least 8, got {0}")]
    BadGridSize(usize),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("not an immersion")]
    NotImmersion,
    #[error("curve is not arclength-parametrized (speed nonuniformity {0:.3e})")]
    NotUniformSpeed(f64),
    #[error("SRVT image not closed (mean integrand norm {mean:.3e} exceeds {tol:.3e})")]
    SrvtNotClosed { mean: f64, tol: f64 },
    #[error("lambda must be nonnegative, got {0}")]
    NegativeLambda(f64),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("semi-axes must be positive, got {0}")]
    NonPositiveAxis(f64),
    #[error("step size must be positive")]
    NonPositiveStep,
    #[error("shrink factor must lie in (0,1), got {0}")]
    BadShrink(f64),
    #[error("left admissible set")]
    LeftAdmissibleSet,
    #[error("objective value is not finite")]
    NonFiniteValue,
    #[error(
        "differential is not representable in the elastic metric \
         (degenerate directions carry relative weight {0:.3e})"
    )]
    ElasticIncompatible(f64),
    #[error("Gram matrix is not symmetric positive definite")]
    GramNotSpd,
    #[error("finite-difference stencil left the immersion set after {0} halvings")]
    FdStencilNotImmersed(u32),
    #[error("no admissible step length in the supplied list")]
    NoAdmissibleStep,
    #[error("sufficient-decrease constant must be positive, got {0}")]
    NonPositiveConstant(f64),
    #[error("lower bound {f_low} exceeds a recorded value {f_min}")]
    BadLowerBound { f_low: f64, f_min: f64 },
    #[error("trace too short: need at least {need} records, got {got}")]
    TraceTooShort { need: usize, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
