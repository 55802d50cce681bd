use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("u must be strictly positive, got {0}")]
    NonPositiveU(f64),
    #[error("v must be nonnegative, got {0}")]
    NegativeV(f64),
    #[error("v must be strictly positive here, got {0}")]
    NonPositiveV(f64),
    #[error("exponent must exceed 1, got {0}")]
    BadExponent(f64),
    #[error("exponent order violated: {0}")]
    ExponentOrder(String),
    #[error("gradient dimensions differ ({0} vs {1}) or are zero")]
    DimensionMismatch(usize, usize),
    #[error("inner product of gradients is negative ({0})")]
    NegativeInnerProduct(f64),
    #[error("f(u) and f'(u) must be positive, got f={0}, f'={1}")]
    NonPositiveF(f64, f64),
    #[error("coefficients must be positive, got alpha={0}, beta={1}")]
    NonPositiveCoefficient(f64, f64),
    #[error("argument s must be nonnegative, got {0}")]
    NegativeS(f64),
    #[error("invalid range: {0}")]
    BadRange(String),
    #[error("p={p} lies in I({q}) with p <= q+1; no violation exists")]
    NotOutsideRegion { p: f64, q: f64 },
    #[error("profiles are sampled on different grids")]
    GridMismatch,
    #[error("profile ratio unbounded: interior minimum {0} below floor")]
    UnboundedRatio(f64),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("weighted integral of phi_p^q must be positive, got {0}")]
    NonPositiveWeightIntegral(f64),
    #[error("integrator failure at r={0}: {1}")]
    StepFailure(f64, String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
