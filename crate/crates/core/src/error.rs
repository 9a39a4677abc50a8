use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a periodic chain needs at least 3 sites, got {0}")]
    TooFewSites(usize),

    #[error("magnon number {m} out of range for {n} sites (allowed 0..={max})", max = 2 * n)]
    MagnonCountOutOfRange { n: usize, m: usize },

    #[error("sector dimension {dim} exceeds the configured cap {cap}")]
    CapacityExceeded { dim: u128, cap: usize },

    #[error("configuration has {got} sites, expected {expected}")]
    SiteCountMismatch { expected: usize, got: usize },

    #[error("configuration carries {got} magnons, sector holds {expected}")]
    MagnonCountMismatch { expected: usize, got: usize },

    #[error("excitation {value} at site {site} is outside 0..=2")]
    InvalidExcitation { site: usize, value: u8 },

    #[error("onsite level {0} is not one of -1, 0, +1")]
    InvalidLevel(i64),

    #[error("site index {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("site {site} raised {count} times; a spin-1 site holds at most 2 magnons")]
    SiteOverfilled { site: usize, count: usize },

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("long-range distance {distance} invalid for {n} sites (need 2 <= d <= {max})", max = n / 2)]
    InvalidLongRange { distance: usize, n: usize },

    #[error("model has {params} sites but the basis was built for {basis}")]
    ParamsBasisMismatch { params: usize, basis: usize },

    #[error("sector dimension {dim} exceeds the dense threshold {threshold}")]
    DenseThresholdExceeded { dim: usize, threshold: usize },

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("vector has length {got}, sector dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("initial state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("time grid must be finite and ascending")]
    InvalidTimes,

    #[error("no initial state bound to the spectral decomposition")]
    OverlapsUnbound,

    #[error("probability {value} at level index {index} is negative")]
    NegativeProbability { index: usize, value: f64 },

    #[error("targets are infeasible: {component} = {value}")]
    Infeasible { component: String, value: f64 },

    #[error("multiplier solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("constraint Jacobian is singular; energy and magnetization constraints are collinear")]
    SingularJacobian,

    #[error("analysis window holds {points} grid points, need at least {min}")]
    WindowTooShort { points: usize, min: usize },

    #[error("averaging window [{lo}, {hi}] contains no grid point")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("group-velocity fit is degenerate: {0}")]
    DegenerateFit(&'static str),

    #[error("group velocity must be positive, got {0}")]
    InvalidVelocity(f64),
}
