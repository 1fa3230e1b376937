//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The Radon-Hurwitz dimension constraints are violated.
    #[error("dimension constraint violated: {0}")]
    DimensionConstraint(String),

    /// Spectrum eigenvalues are not strictly increasing.
    #[error("spectrum eigenvalues must satisfy 0 < a_1 < ... < a_l")]
    NonIncreasingSpectrum,

    /// Some Laplacian weight b_l is negative.
    #[error("Laplacian weights b_l must be nonnegative")]
    NegativeWeight,

    /// Structure matrices fail skew-symmetry or the H-type relation.
    #[error("invalid structure matrices: {0}")]
    InvalidU(String),

    /// An operation needing structure matrices was called on a spec without them.
    #[error("structure matrices U are not present in this spec")]
    MissingU,

    /// Canonical U construction requested for a center dimension it does not cover.
    #[error("canonical structure matrices are only defined for m = 1 (got m = {0})")]
    WrongCenterDim(usize),

    /// Argument outside the domain of a scalar function.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Radial argument at or beyond the zero r_* of the function G.
    #[error("radial argument {r} is at or beyond r_* = {r_star}")]
    BeyondRStar { r: f64, r_star: f64 },

    /// The top spectral block of x vanishes; geodesic coordinates are unavailable.
    #[error("top spectral block of x vanishes; geodesic coordinates unavailable")]
    DegenerateX,

    /// A coordinate of g vanishes; the saddle-point machinery requires g in the open set G.
    #[error("some coordinate of g vanishes; saddle analysis requires all x_i, t_l nonzero")]
    OutsideDomainG,

    /// An iterative solver exhausted its budget.
    #[error("solver failed to converge: {0}")]
    NoConvergence(String),

    /// A quadrature consistency check failed.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// The configured evaluation or sample budget is too small.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// The requested combination of dimensions is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
