//! Exact and multiprecision substrate shared by every other module.

use core::fmt;

pub mod arith;
pub mod matrix;
pub mod modp;
pub mod mp;
pub mod poly;
pub mod resultant;
pub mod roots;

pub use mp::{MpReal, PrecComplex, Precision};
pub use poly::IntPolynomial;
pub use resultant::resultant;
pub use roots::poly_roots;

/// Reduced fraction with positive denominator.
pub type ExactRational = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq)]
pub enum NumError {
    ZeroPolynomial,
    ConstantPolynomial,
    /// The iteration cap was hit; retry at a higher precision.
    NonConvergence { iterations: usize, worst_residual: f64 },
    NonFinite,
}

impl fmt::Display for NumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumError::ZeroPolynomial => f.write_str("zero polynomial"),
            NumError::ConstantPolynomial => f.write_str("constant polynomial has no roots"),
            NumError::NonConvergence { iterations, worst_residual } => {
                write!(f, "root finder did not converge after {iterations} iterations (residual {worst_residual:e})")
            }
            NumError::NonFinite => f.write_str("non-finite value in multiprecision arithmetic"),
        }
    }
}
