//! Exact arithmetic: rationals, polynomials, rational functions and
//! truncated Laurent series with order tracking.

mod poly;
mod ratfunc;
mod rational;
mod roots;
mod series;

pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub use rational::{
    binomial, denominator_lcm, factorial, parse_rational, pow, rat, ratio, sqrt_exact, Rational,
};
pub use roots::{partial_fractions, rational_roots, PartialFractions, RootSplit};
pub use series::TruncatedSeries;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("order underflow: need coefficients below s^{required}, only certified below s^{available}")]
    OrderUnderflow { required: i64, available: i64 },
    #[error("valuation must be {expected}, found {found}")]
    InvalidValuation { expected: &'static str, found: i64 },
    #[error("leading coefficient {0} is not the square of a rational")]
    NotASquare(Rational),
    #[error("series has a disallowed constant term")]
    ConstantTerm,
    #[error("primitive would need a logarithm (nonzero s^-1 coefficient)")]
    LogarithmicTerm,
    #[error("denominator does not split over the given rational poles; remaining factor {0}")]
    NonSplitting(Polynomial),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}
