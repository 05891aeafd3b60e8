use thiserror::Error;

/// Errors raised across the crate.
///
/// Every variant is a domain error: the input was well-formed but the
/// requested object does not exist or could not be computed at the current
/// precision or budget.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid slope {p}/{q}: need gcd(p,q)=1 and 1 <= p <= q")]
    InvalidSlope { p: i64, q: i64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("floating-point overflow while evaluating a polynomial of degree {degree}")]
    Overflow { degree: usize },
    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("continuation stalled at parameter {at} (step fell below {min_step:e})")]
    ContinuationStalled { at: f64, min_step: f64 },
    #[error("continuation failed along every path perturbation")]
    ContinuationFailed,
    #[error("landed cusp for {slope} has residual {residual:e}")]
    CuspMismatch { slope: String, residual: f64 },
    #[error("point is within {tol:e} of the boundary Re P = -2")]
    BoundaryIndeterminate { tol: f64 },
    #[error("Mobius map fixes infinity (c = 0)")]
    InfinityFixed,
    #[error("lower-left entry is degenerate (|c| = {modulus:e})")]
    DegenerateC { modulus: f64 },
    #[error("generators share a fixed point")]
    CommutingGenerators,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
