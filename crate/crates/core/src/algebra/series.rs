//! Truncated Laurent series with an explicit precision watermark.
//!
//! A series `s^v (c_0 + c_1 s + ...) + O(s^N)` stores every coefficient of
//! the window `v <= k < N`. Coefficients at or above `N` are unknown and are
//! never reported: asking for one is an [`AlgebraError::OrderUnderflow`].
//! The zero series is the empty window `v == N`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{rat, sqrt_exact, AlgebraError, Polynomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    valuation: i64,
    coeffs: Vec<Rational>,
    order: i64,
}

impl TruncatedSeries {
    /// Builds `s^valuation * sum coeffs[k] s^k + O(s^order)`.
    ///
    /// Coefficients past the order are dropped, missing ones inside the window are zero.
    pub fn new(valuation: i64, mut coeffs: Vec<Rational>, order: i64) -> Self {
        let window = (order - valuation).max(0) as usize;
        coeffs.resize(window, Rational::zero());
        Self::normalized(valuation, coeffs, order)
    }

    fn normalized(valuation: i64, coeffs: Vec<Rational>, order: i64) -> Self {
        match coeffs.iter().position(|c| !c.is_zero()) {
            Some(0) => Self {
                valuation,
                coeffs,
                order,
            },
            Some(skip) => Self {
                valuation: valuation + skip as i64,
                coeffs: coeffs[skip..].to_vec(),
                order,
            },
            None => Self::zero(order),
        }
    }

    pub fn zero(order: i64) -> Self {
        Self {
            valuation: order,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(Rational::one(), 0, order)
    }

    /// `c * s^k + O(s^order)`.
    pub fn monomial(c: Rational, k: i64, order: i64) -> Self {
        if k >= order {
            return Self::zero(order);
        }
        Self::new(k, vec![c], order)
    }

    pub fn from_poly(p: &Polynomial, order: i64) -> Self {
        Self::new(0, p.coeffs().to_vec(), order)
    }

    pub fn from_ints(valuation: i64, coeffs: &[i64], order: i64) -> Self {
        Self::new(valuation, coeffs.iter().map(|&c| rat(c)).collect(), order)
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Number of certified coefficients after the leading one.
    pub fn precision(&self) -> i64 {
        self.order - self.valuation
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Window coefficients, starting at the valuation.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.first()
    }

    /// Coefficient of `s^k`; an error when `k` lies beyond the certified window.
    pub fn coeff(&self, k: i64) -> Result<Rational, AlgebraError> {
        if k >= self.order {
            return Err(AlgebraError::OrderUnderflow {
                required: k + 1,
                available: self.order,
            });
        }
        Ok(self.coeff_unchecked(k))
    }

    fn coeff_unchecked(&self, k: i64) -> Rational {
        if k < self.valuation {
            return Rational::zero();
        }
        self.coeffs
            .get((k - self.valuation) as usize)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `s^-1`.
    pub fn residue(&self) -> Result<Rational, AlgebraError> {
        self.coeff(-1)
    }

    /// Lowers the order to `order` (no-op if already lower).
    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        if order <= self.valuation {
            return Self::zero(order);
        }
        let keep = (order - self.valuation) as usize;
        Self::normalized(self.valuation, self.coeffs[..keep].to_vec(), order)
    }

    /// Multiplies by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            valuation: self.valuation + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        Self {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            order: self.order,
        }
    }

    /// Product, with its order additionally capped at `cap`.
    pub fn mul_capped(&self, other: &Self, cap: i64) -> Self {
        let order = (self.order + other.valuation)
            .min(other.order + self.valuation)
            .min(cap);
        if self.is_zero() || other.is_zero() {
            return Self::zero(order);
        }
        let valuation = self.valuation + other.valuation;
        if order <= valuation {
            return Self::zero(order);
        }
        let len = (order - valuation) as usize;
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::normalized(valuation, out, order)
    }

    /// Multiplicative inverse; requires a nonzero series.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        let c0 = self.leading().ok_or(AlgebraError::DivisionByZero)?;
        let inv0 = c0.recip();
        let len = self.coeffs.len();
        let mut out: Vec<Rational> = Vec::with_capacity(len);
        out.push(inv0.clone());
        for k in 1..len {
            let mut acc = Rational::zero();
            for j in 1..=k {
                let b = &self.coeffs[j];
                if !b.is_zero() {
                    acc += b * &out[k - j];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(Self::normalized(
            -self.valuation,
            out,
            -self.valuation + len as i64,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, exp: i64) -> Result<Self, AlgebraError> {
        if exp == 0 {
            return Ok(Self::one(self.precision()));
        }
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut result: Option<Self> = None;
        let mut square = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    Some(r) => &r * &square,
                    None => square.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                square = &square * &square;
            }
        }
        Ok(result.expect("nonzero exponent"))
    }

    /// Term-wise derivative in `s`.
    pub fn derivative(&self) -> Self {
        let coeffs = (self.valuation - 1..self.order - 1)
            .map(|j| self.coeff_unchecked(j + 1) * rat(j + 1))
            .collect();
        Self::normalized(self.valuation - 1, coeffs, self.order - 1)
    }

    /// Term-wise primitive with zero constant term.
    pub fn integral(&self) -> Result<Self, AlgebraError> {
        if self.valuation <= -1 && self.order > -1 && !self.coeff_unchecked(-1).is_zero() {
            return Err(AlgebraError::LogarithmicTerm);
        }
        if self.order <= -1 {
            return Err(AlgebraError::OrderUnderflow {
                required: 0,
                available: self.order,
            });
        }
        let coeffs = (self.valuation + 1..self.order + 1)
            .map(|j| {
                if j == 0 {
                    Rational::zero()
                } else {
                    self.coeff_unchecked(j - 1) / rat(j)
                }
            })
            .collect();
        Ok(Self::normalized(self.valuation + 1, coeffs, self.order + 1))
    }

    /// `self(inner(s))`; `inner` must have no constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, AlgebraError> {
        if inner.valuation < 1 {
            return Err(AlgebraError::ConstantTerm);
        }
        let v_in = inner.valuation;
        let order = if self.is_zero() {
            self.order.saturating_mul(v_in)
        } else {
            (self.order.saturating_mul(v_in)).min(self.valuation * v_in + inner.precision())
        };
        if self.is_zero() {
            return Ok(Self::zero(order));
        }
        let base = self.valuation * v_in;
        let cap = order - base;
        let mut acc = Self::zero(cap);
        for c in self.coeffs.iter().rev() {
            acc = &acc.mul_capped(inner, cap) + &Self::monomial(c.clone(), 0, cap);
        }
        let lead = inner.pow(self.valuation)?;
        Ok(acc.mul_capped(&lead, order))
    }

    /// Compositional inverse `g` with `self(g(s)) = s`.
    ///
    /// Uses Lagrange inversion: `[s^n] g = (1/n) [w^(n-1)] (w / f(w))^n`.
    pub fn reversion(&self) -> Result<Self, AlgebraError> {
        if self.valuation != 1 {
            return Err(AlgebraError::InvalidValuation {
                expected: "exactly 1",
                found: self.valuation,
            });
        }
        let order = self.order;
        let phi = self.shift(-1).inv()?;
        let mut power = Self::one(phi.order);
        let mut coeffs = Vec::with_capacity((order - 1) as usize);
        for n in 1..order {
            power = &power * &phi;
            coeffs.push(power.coeff(n - 1)? / rat(n));
        }
        Ok(Self::new(1, coeffs, order))
    }

    /// `exp(self)`; requires a series without constant term.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if self.valuation < 1 {
            return Err(AlgebraError::InvalidValuation {
                expected: "at least 1",
                found: self.valuation,
            });
        }
        let order = self.order;
        if order <= 0 {
            return Ok(Self::zero(order));
        }
        let mut e: Vec<Rational> = vec![Rational::one()];
        for n in 1..order {
            let mut acc = Rational::zero();
            for k in 1..=n {
                let f = self.coeff_unchecked(k);
                if !f.is_zero() {
                    acc += f * rat(k) * &e[(n - k) as usize];
                }
            }
            e.push(acc / rat(n));
        }
        Ok(Self::normalized(0, e, order))
    }

    /// `log(self)`; requires constant term exactly 1.
    pub fn log(&self) -> Result<Self, AlgebraError> {
        if self.valuation != 0 || !self.coeffs[0].is_one() {
            return Err(AlgebraError::ConstantTerm);
        }
        let order = self.order;
        let mut l: Vec<Rational> = vec![Rational::zero()];
        for n in 1..order {
            let mut acc = self.coeff_unchecked(n) * rat(n);
            for k in 1..n {
                let f = self.coeff_unchecked(n - k);
                if !f.is_zero() {
                    acc -= &l[k as usize] * rat(k) * f;
                }
            }
            l.push(acc / rat(n));
        }
        Ok(Self::normalized(0, l, order))
    }

    /// Square root with positive leading coefficient.
    pub fn sqrt(&self) -> Result<Self, AlgebraError> {
        let c = self.leading().ok_or(AlgebraError::DivisionByZero)?;
        if self.valuation % 2 != 0 {
            return Err(AlgebraError::InvalidValuation {
                expected: "even",
                found: self.valuation,
            });
        }
        let root = sqrt_exact(c).ok_or_else(|| AlgebraError::NotASquare(c.clone()))?;
        let unit: Vec<Rational> = self.coeffs.iter().map(|a| a / c).collect();
        let mut r: Vec<Rational> = vec![Rational::one()];
        let two = rat(2);
        for k in 1..unit.len() {
            let mut acc = unit[k].clone();
            for i in 1..k {
                acc -= &r[i] * &r[k - i];
            }
            r.push(acc / &two);
        }
        let half = self.valuation / 2;
        let len = r.len() as i64;
        Ok(Self::normalized(half, r, half + len).scale(&root))
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        let valuation = self.valuation.min(rhs.valuation).min(order);
        let coeffs = (valuation..order)
            .map(|k| self.coeff_unchecked(k) + rhs.coeff_unchecked(k))
            .collect();
        TruncatedSeries::normalized(valuation, coeffs, order)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.mul_capped(rhs, i64::MAX / 4)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write!(f, "({c})s^{} + ", self.valuation + i as i64)?;
        }
        write!(f, "O(s^{})", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    fn s(val: i64, c: &[i64], order: i64) -> TruncatedSeries {
        TruncatedSeries::from_ints(val, c, order)
    }

    #[test]
    fn difference_of_squares() {
        let p = &s(0, &[1, 1], 5) * &s(0, &[1, -1], 5);
        assert_eq!(p, s(0, &[1, 0, -1], 5));
    }

    #[test]
    fn geometric_series() {
        let g = s(0, &[1, -1], 4).inv().unwrap();
        assert_eq!(g, s(0, &[1, 1, 1, 1], 4));
    }

    #[test]
    fn long_division() {
        let q = s(1, &[2, 0, 1], 4).div(&s(1, &[2], 4)).unwrap();
        assert_eq!(q.order(), 3);
        assert_eq!(q, TruncatedSeries::new(0, vec![rat(1), rat(0), ratio(1, 2)], 3));
    }

    #[test]
    fn division_by_zero_series() {
        assert_eq!(
            s(0, &[1], 3).div(&TruncatedSeries::zero(3)),
            Err(AlgebraError::DivisionByZero)
        );
    }

    #[test]
    fn zero_series_absorbs() {
        let z = TruncatedSeries::zero(3);
        let p = &z * &s(-1, &[1, 2], 4);
        assert!(p.is_zero());
        assert_eq!(p.order(), 2);
        assert_eq!(p.valuation(), p.order());
    }

    #[test]
    fn coefficient_beyond_order_is_an_error() {
        let a = s(0, &[1, 1], 2);
        assert!(matches!(
            a.coeff(2),
            Err(AlgebraError::OrderUnderflow {
                required: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn composition_examples() {
        let sq = s(2, &[1], 10);
        let inner = s(1, &[-1, 1], 10);
        assert_eq!(sq.compose(&inner).unwrap().truncate(5), s(2, &[1, -2, 1], 5));

        let geo = s(0, &[1, 1, 1], 3);
        let r = geo.compose(&s(2, &[1], 100)).unwrap();
        assert_eq!(r.truncate(6), s(0, &[1, 0, 1, 0, 1], 6));

        let outer = s(1, &[1, 1], 4);
        let inner = s(1, &[1, -1], 4);
        let r = outer.compose(&inner).unwrap();
        // (s - s^2) + (s - s^2)^2 = s - 2s^3 + s^4
        assert_eq!(r.order(), 4);
        assert_eq!(r, s(1, &[1, 0, -2], 4));
    }

    #[test]
    fn composition_rejects_constant_term() {
        let outer = s(-1, &[1], 5);
        assert_eq!(outer.compose(&s(0, &[1, 1], 5)), Err(AlgebraError::ConstantTerm));
    }

    #[test]
    fn reversion_examples() {
        let id = s(1, &[1], 6);
        assert_eq!(id.reversion().unwrap(), id);
        let cat = s(1, &[1, -1], 6).reversion().unwrap();
        assert_eq!(cat, s(1, &[1, 1, 2, 5, 14], 6));
        let lin = s(1, &[2], 4).reversion().unwrap();
        assert_eq!(lin, TruncatedSeries::new(1, vec![ratio(1, 2)], 4));
        assert!(s(2, &[1], 4).reversion().is_err());
    }

    #[test]
    fn exp_and_log() {
        assert_eq!(TruncatedSeries::zero(4).exp().unwrap(), TruncatedSeries::one(4));
        let e = s(1, &[1], 4).exp().unwrap();
        assert_eq!(
            e,
            TruncatedSeries::new(0, vec![rat(1), rat(1), ratio(1, 2), ratio(1, 6)], 4)
        );
        let l = s(0, &[1, -1], 4).log().unwrap();
        assert_eq!(
            l,
            TruncatedSeries::new(1, vec![rat(-1), ratio(-1, 2), ratio(-1, 3)], 4)
        );
        assert!(s(0, &[1], 4).exp().is_err());
        assert!(s(0, &[2], 4).log().is_err());
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(s(2, &[1], 6).sqrt().unwrap(), s(1, &[1], 5));
        let r = s(2, &[4, 4], 5).sqrt().unwrap();
        assert_eq!(
            r,
            TruncatedSeries::new(1, vec![rat(2), rat(1), ratio(-1, 4)], 4)
        );
        assert_eq!(s(2, &[2], 5).sqrt(), Err(AlgebraError::NotASquare(rat(2))));
    }

    #[test]
    fn residues() {
        assert_eq!(s(-1, &[1, 3, 1], 2).residue().unwrap(), rat(1));
        assert_eq!(s(-2, &[1], 3).residue().unwrap(), rat(0));
        let p = &s(-3, &[1], 5) * &TruncatedSeries::new(0, vec![rat(1), rat(0), ratio(1, 4)], 5);
        assert_eq!(p.residue().unwrap(), ratio(1, 4));
        assert!(s(-3, &[1, 0], -1).residue().is_err());
    }

    #[test]
    fn integral_rejects_log_term() {
        assert_eq!(s(-1, &[1], 3).integral(), Err(AlgebraError::LogarithmicTerm));
        let i = s(0, &[0, 0, 2], 5).integral().unwrap();
        assert_eq!(i, TruncatedSeries::new(3, vec![ratio(2, 3)], 6));
    }
}
