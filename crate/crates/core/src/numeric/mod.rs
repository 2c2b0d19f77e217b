//! Exact arithmetic substrate: big rationals, quadratic surds and certified
//! interval reals.

mod interval;
mod parse;
mod real;
mod surd;

pub use interval::{atan_rational, pi_interval, Interval};
pub use parse::{parse_real, RealFormat};
pub use real::{
    certify_lt, cmp_real, compare_certified, dyadic_bracket, Approximator, IntervalReal,
    Precision, RealScalar,
};
pub use surd::QuadSurd;


/// Reduced fraction of arbitrary-precision integers.
pub type BigRational = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    #[error("comparison unresolved at {bits} bits of precision")]
    Unresolved { bits: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("cannot parse real number {0:?}")]
    Parse(String),
}
