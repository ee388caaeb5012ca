//! The recursion engine: correlators `ω_n^(g)`, the invariants `F_g`, and the
//! dilaton identity.
//!
//! Residues are computed at each branch point in `s = ζ - a`, with the
//! conjugate point realised as `a + σ(s)`. The first slot is distinguished
//! during the computation; symmetry of the result is checked, not imposed.
//!
//! The unstable forms are served separately. `ω_1^(0) = -y dx` and
//! `ω_2^(0) = dζ1 dζ2/(ζ1 - ζ2)²`. Note that `Φ` integrates `+y dx`.

mod engine;
mod local;
mod tensor;

pub use engine::Engine;
pub use local::{LocalData, Sheet};
pub use tensor::{BasisForm, CorrelatorTensor, TensorRecord};

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{binomial, pow, rat, AlgebraError, Rational, RationalFunction, TruncatedSeries};
use crate::curve::{ChartPoint, CurveError, SpectralCurve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("(g, n) = ({g}, {n}) is unstable; use the closed-form accessor for ω_1^(0) or ω_2^(0)")]
    Unstable { g: u32, n: u32 },
    #[error("frame order still insufficient for (g, n) = ({g}, {n}) at order {order}")]
    OrderUnderflow { g: u32, n: u32, order: i64 },
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `2 - 2g - n < 0`.
pub fn is_stable(g: u32, n: u32) -> bool {
    2 * g + n > 2
}

/// Coefficient of `dζ` in `ω_1^(0) = -y dx`.
pub fn omega01(curve: &SpectralCurve) -> RationalFunction {
    -&(&curve.y * &curve.rho)
}

/// Coefficient of `dζ1 dζ2` in `ω_2^(0)`.
pub fn bergman(z1: &Rational, z2: &Rational) -> Option<Rational> {
    let d = z1 - z2;
    (!d.is_zero()).then(|| (&d * &d).recip())
}

/// Local variable `t` at an expansion centre: `ζ = p + t`, or `ζ = 1/t` at infinity.
///
/// Returns the expansion of `dζ/(ζ - a)^m` as a series in `t` times `dt`,
/// exact below `order`.
pub fn basis_form_at(a: &Rational, m: u32, point: &ChartPoint, order: i64) -> Result<TruncatedSeries, AlgebraError> {
    let m = m as i64;
    match point {
        ChartPoint::Finite(p) if p == a => Ok(TruncatedSeries::monomial(Rational::one(), -m, order)),
        ChartPoint::Finite(p) => {
            let d = p - a;
            let coeffs = (0..order.max(0))
                .map(|j| {
                    let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
                    sign * binomial(m + j - 1, j) * pow(&d, -m - j).expect("distinct points")
                })
                .collect();
            Ok(TruncatedSeries::new(0, coeffs, order))
        }
        ChartPoint::Infinity => {
            // -t^(m-2) (1 - a t)^-m dt
            let len = (order - (m - 2)).max(0);
            let coeffs = (0..len)
                .map(|j| -binomial(m + j - 1, j) * pow(a, j).expect("nonnegative exponent"))
                .collect();
            Ok(TruncatedSeries::new(m - 2, coeffs, order))
        }
    }
}

/// Multivariate Laurent expansion of a correlator: the coefficient of
/// `Π t_i^(e_i) dt_i`, with slot `i` exact for `e_i < orders[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalExpansion {
    pub points: Vec<ChartPoint>,
    pub orders: Vec<i64>,
    pub coeffs: BTreeMap<Vec<i64>, Rational>,
}

/// Expands every basis form of `t` in the per-slot local variables.
pub fn evaluate_local(
    t: &CorrelatorTensor,
    slots: &[(ChartPoint, i64)],
) -> Result<LocalExpansion, AlgebraError> {
    assert_eq!(slots.len(), t.n as usize, "one expansion centre per slot");
    let mut cache: BTreeMap<(usize, BasisForm), TruncatedSeries> = BTreeMap::new();
    let mut coeffs: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    for (key, c) in &t.entries {
        let mut partial: Vec<(Vec<i64>, Rational)> = vec![(Vec::new(), c.clone())];
        for (i, f) in key.iter().enumerate() {
            let (point, order) = &slots[i];
            if !cache.contains_key(&(i, *f)) {
                let s = basis_form_at(&t.branch_points[f.point], f.order, point, *order)?;
                cache.insert((i, *f), s);
            }
            let s = &cache[&(i, *f)];
            let mut next = Vec::new();
            for (exps, v) in &partial {
                for (j, a) in s.coeffs().iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut e = exps.clone();
                    e.push(s.valuation() + j as i64);
                    next.push((e, v * a));
                }
            }
            partial = next;
        }
        for (e, v) in partial {
            let slot = coeffs.entry(e).or_insert_with(Rational::zero);
            *slot += v;
        }
    }
    coeffs.retain(|_, v| !v.is_zero());
    Ok(LocalExpansion {
        points: slots.iter().map(|s| s.0.clone()).collect(),
        orders: slots.iter().map(|s| s.1).collect(),
        coeffs,
    })
}

/// Both sides of the dilaton identity and their difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilatonCertificate {
    pub lhs: CorrelatorTensor,
    pub rhs: CorrelatorTensor,
    pub difference: CorrelatorTensor,
}

impl DilatonCertificate {
    pub fn holds(&self) -> bool {
        self.difference.is_zero()
    }
}

impl Engine {
    /// `F_g = (1/(2 - 2g)) Σ_i Res_{a_i} ω_1^(g) Φ`.
    pub fn fg(&self, g: u32) -> Result<Rational, EngineError> {
        self.fg_with_phi_constant(g, &Rational::zero())
    }

    /// `F_g` computed with `Φ + c` in place of `Φ`.
    pub fn fg_with_phi_constant(&self, g: u32, c: &Rational) -> Result<Rational, EngineError> {
        if g < 2 {
            return Err(EngineError::OutOfScope(format!("F_{g} is not computed; g must be at least 2")));
        }
        let w = self.correlator(g, 1)?;
        let frames = self.frames(self.base_order(g, 2))?;
        let mut total = Rational::zero();
        for (key, coeff) in &w.entries {
            let f = key[0];
            let local = &frames[f.point];
            let mut phi = local.phi_coeff(f.order as i64 - 1)?;
            if f.order == 1 {
                phi += c;
            }
            total += coeff * phi;
        }
        Ok(total / rat(2 - 2 * g as i64))
    }

    /// `(2g - 2 + n) ω_n^(g) = Σ_i Res_{z→a_i} Φ(z) ω_{n+1}^(g)(·, z)`.
    pub fn dilaton_check(&self, g: u32, n: u32) -> Result<DilatonCertificate, EngineError> {
        if !is_stable(g, n) {
            return Err(EngineError::Unstable { g, n });
        }
        let lower = self.correlator(g, n)?;
        let upper = self.correlator(g, n + 1)?;
        let lhs = lower.scale(&rat(2 * g as i64 - 2 + n as i64));
        let frames = self.frames(self.base_order(g, n + 1) + 2)?;
        let mut rhs = CorrelatorTensor::new(g, n, lower.branch_points.clone());
        for (key, coeff) in &upper.entries {
            let (last, rest) = key.split_last().expect("n + 1 slots");
            let phi = frames[last.point].phi_coeff(last.order as i64 - 1)?;
            rhs.add(rest.to_vec(), coeff * phi);
        }
        let difference = lhs.sub(&rhs);
        Ok(DilatonCertificate { lhs, rhs, difference })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, Polynomial};

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Polynomial::from_ints(num), Polynomial::from_ints(den)).unwrap()
    }

    fn airy() -> SpectralCurve {
        SpectralCurve::new("airy", rf(&[0, 1], &[1]), rf(&[0, 2], &[1]), Some(rf(&[0, 0, 1], &[1]))).unwrap()
    }

    #[test]
    fn airy_low_correlators() {
        let e = Engine::new(airy()).unwrap();
        let w03 = e.correlator(0, 3).unwrap();
        assert_eq!(w03.entries.len(), 1);
        assert_eq!(w03.coeff(&[BasisForm::new(0, 2); 3]), ratio(1, 2));
        let w11 = e.correlator(1, 1).unwrap();
        assert_eq!(w11.entries.len(), 1);
        assert_eq!(w11.coeff(&[BasisForm::new(0, 4)]), ratio(1, 16));
    }

    #[test]
    fn unstable_requests_are_rejected() {
        let e = Engine::new(airy()).unwrap();
        assert_eq!(e.correlator(0, 2).unwrap_err(), EngineError::Unstable { g: 0, n: 2 });
        assert!(matches!(e.fg(1), Err(EngineError::OutOfScope(_))));
        assert!(e.dilaton_check(0, 2).is_err());
    }

    #[test]
    fn basis_forms_at_infinity() {
        // dζ/ζ² at ζ = 1/t is -dt
        let s = basis_form_at(&rat(0), 2, &ChartPoint::Infinity, 3).unwrap();
        assert_eq!(s, TruncatedSeries::from_ints(0, &[-1], 3));
        // dζ/(ζ-1)² at ζ = 1/t is -(1 - t)^-2 dt
        let s = basis_form_at(&rat(1), 2, &ChartPoint::Infinity, 3).unwrap();
        assert_eq!(s, TruncatedSeries::from_ints(0, &[-1, -2, -3], 3));
    }

    #[test]
    fn local_expansion_of_airy_three_point() {
        let e = Engine::new(airy()).unwrap();
        let w = e.correlator(0, 3).unwrap();
        let p = ChartPoint::Finite(rat(0));
        let le = evaluate_local(&w, &[(p.clone(), 2), (p.clone(), 2), (p, 2)]).unwrap();
        assert_eq!(le.coeffs.len(), 1);
        assert_eq!(le.coeffs[&vec![-2, -2, -2]], ratio(1, 2));
        let q = ChartPoint::Finite(rat(1));
        let le = evaluate_local(&w, &[(q.clone(), 2), (q.clone(), 2), (q, 2)]).unwrap();
        assert!(le.coeffs.keys().all(|e| e.iter().all(|&k| k >= 0)));
    }
}
