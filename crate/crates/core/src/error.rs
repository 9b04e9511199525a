use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure a computation in this crate can report.
///
/// Variants are grouped by the kind of failure rather than by module so that
/// front ends can map them onto stable machine-readable codes with [`Error::code`].
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("exponent {0} is not on the half-integer lattice")]
    Lattice(String),

    #[error("coefficient at exponent {exponent} lies at or beyond the truncation order {trunc}")]
    Truncated { exponent: String, trunc: String },

    #[error("division by a zero {0}")]
    Division(&'static str),

    #[error("unsupported scalar: {0}")]
    UnsupportedScalar(String),

    #[error("recurrence did not stabilise within {iterations} iterations")]
    IterationDepth { iterations: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("integrand does not decay: {0}")]
    Divergence(String),

    #[error("pole on the integration contour near p = {p}")]
    Contour { p: Complex64 },

    #[error("degenerate Padé system: {0}")]
    Degenerate(String),

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("Laplace integral truncated too early: tail bound {bound:e}, need p_max >= {required_p_max}")]
    LaplaceTruncation { bound: f64, required_p_max: f64 },

    #[error("Picard iteration is not contracting (ratios {ratios:?})")]
    NoContraction { ratios: Vec<f64> },

    #[error("Picard iteration reached {iterations} iterations without meeting the tolerance")]
    PicardBudget { iterations: usize },

    #[error("outside the regime of the asymptotic expansion: {0}")]
    OutOfRegime(String),

    #[error("series budget exceeded: {0}")]
    Budget(String),

    #[error("approaching a singularity; last reliable point {last_reliable}")]
    SingularityProximity { last_reliable: Complex64 },

    #[error("far-field matching failed: {0}")]
    Matching(String),

    #[error("unstable integration: {0}")]
    Unstable(String),

    #[error("Newton iteration did not converge after {iterations} iterations (|F| = {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        trajectory: Vec<Complex64>,
    },

    #[error("branch collision: sqrt(U) -> 1")]
    BranchCollision,

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("Stokes constant indeterminate: {0}")]
    IndeterminateConstant(String),
}

impl Error {
    /// Stable short code used in machine-readable error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config(_) => "configuration",
            Error::Lattice(_) => "lattice",
            Error::Truncated { .. } => "truncated",
            Error::Division(_) => "division",
            Error::UnsupportedScalar(_) => "unsupported_scalar",
            Error::IterationDepth { .. } => "iteration_depth",
            Error::Parse(_) => "parse",
            Error::Divergence(_) => "divergence",
            Error::Contour { .. } => "contour",
            Error::Degenerate(_) => "degenerate",
            Error::Quadrature { .. } => "quadrature",
            Error::LaplaceTruncation { .. } => "truncation",
            Error::NoContraction { .. } => "no_contraction",
            Error::PicardBudget { .. } => "picard_budget",
            Error::OutOfRegime(_) => "out_of_regime",
            Error::Budget(_) => "budget",
            Error::SingularityProximity { .. } => "singularity_proximity",
            Error::Matching(_) => "matching",
            Error::Unstable(_) => "unstable",
            Error::NoConvergence { .. } => "no_convergence",
            Error::BranchCollision => "branch_collision",
            Error::Sampling(_) => "sampling",
            Error::IndeterminateConstant(_) => "indeterminate_constant",
        }
    }
}
