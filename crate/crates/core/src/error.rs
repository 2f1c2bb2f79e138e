use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coincident nodes: gap {gap:e} at index {index} is below the minimum {gap_min:e}")]
    CoincidentNodes { index: usize, gap: f64, gap_min: f64 },
    #[error("abscissae are not strictly increasing at index {index}")]
    Unsorted { index: usize },
    #[error("grid has {xs} abscissae but {ys} ordinates")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("grid must contain at least one node")]
    EmptyGrid,
    #[error("order {order} needs at least {needed} nodes, grid has {have}")]
    InsufficientNodes { order: usize, needed: usize, have: usize },
    #[error("requested order {order} needs more than the {nodes} available nodes")]
    OrderTooLarge { order: usize, nodes: usize },
    #[error("point {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
    #[error("derivative order {0} is not supported (maximum 3)")]
    DerivativeOrder(usize),
    #[error("quadrature failed to converge on [{a}, {b}] (error estimate {estimate:e})")]
    QuadratureNonconvergence { a: f64, b: f64, estimate: f64 },
    #[error("interpolation nodes coincide")]
    DegenerateInterpolation,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("invalid weight specification: {0}")]
    WeightSpec(String),
    #[error("not a probability measure: {0}")]
    NotProbability(String),
    #[error("measure support [{lo}, {hi}] exceeds the interval [{a}, {b}]")]
    SupportMismatch { lo: f64, hi: f64, a: f64, b: f64 },
    #[error("epsilon {eps} must lie in (0, {max})")]
    EpsilonRange { eps: f64, max: f64 },
    #[error("alpha {0} must lie in (0, 1]")]
    BadAlpha(f64),
    #[error("subset size k = {k} must satisfy 2 <= k < n = {n}")]
    SubsetSize { k: usize, n: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    EigenNonconvergence { sweeps: usize, off: f64 },
    #[error("matrices {i} and {j} do not commute (commutator norm {norm:e})")]
    Noncommuting { i: usize, j: usize, norm: f64 },
    #[error("could not resolve a degenerate joint spectrum (residual off-diagonal mass {0:e})")]
    DegeneracyUnresolved(f64),
    #[error("eigenvalue {0} lies outside the model domain")]
    EigenvalueDomain(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
