use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{AlgebraError, Polynomial, Rational, TruncatedSeries};

/// A quotient of polynomials, kept coprime with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g)?;
        let (den, _) = den.div_rem(&g)?;
        let lead = den.leading().recip();
        Ok(Self {
            num: num.scale(&lead),
            den: den.scale(&lead),
        })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    /// The coordinate function `z`.
    pub fn identity() -> Self {
        Self::from_poly(Polynomial::from_ints(&[0, 1]))
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("denominator nonzero")
    }

    /// Value at `x`; `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn derivative(&self) -> Self {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(top, &self.den * &self.den).expect("denominator nonzero")
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Self) -> Result<Self, AlgebraError> {
        let horner = |p: &Polynomial| {
            p.coeffs()
                .iter()
                .rev()
                .fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
        };
        &horner(&self.num) / &horner(&self.den)
    }

    /// Laurent expansion in `t` where `z = point + t`, exact below `order`.
    pub fn expand_at(&self, point: &Rational, order: i64) -> Result<TruncatedSeries, AlgebraError> {
        quotient_series(&self.num.shift(point), &self.den.shift(point), 0, order)
    }

    /// Laurent expansion in `t = 1/z` around `z = infinity`, exact below `order`.
    pub fn expand_at_infinity(&self, order: i64) -> Result<TruncatedSeries, AlgebraError> {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        // p(1/t) = t^-deg * reversed(p)(t)
        quotient_series(
            &self.num.reversed(dn),
            &self.den.reversed(dd),
            dd as i64 - dn as i64,
            order,
        )
    }
}

fn low_degree(p: &Polynomial) -> i64 {
    p.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0) as i64
}

/// `t^shift * num(t) / den(t)` with both polynomials taken exactly, certified below `order`.
fn quotient_series(
    num: &Polynomial,
    den: &Polynomial,
    shift: i64,
    order: i64,
) -> Result<TruncatedSeries, AlgebraError> {
    if den.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(TruncatedSeries::zero(order));
    }
    let (vn, vd) = (low_degree(num), low_degree(den));
    let precision = order - (vn - vd + shift);
    if precision <= 0 {
        return Ok(TruncatedSeries::zero(order));
    }
    let n = TruncatedSeries::from_poly(num, vn + precision);
    let d = TruncatedSeries::from_poly(den, vd + precision);
    Ok(n.div(&d)?.shift(shift))
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(num, &self.den * &rhs.den).expect("denominator nonzero")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("denominator nonzero")
    }
}

impl Div for &RationalFunction {
    type Output = Result<RationalFunction, AlgebraError>;
    fn div(self, rhs: &RationalFunction) -> Self::Output {
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Polynomial::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        &self * &rhs
    }
}
