use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::OracleError;
use crate::algebra::{rat, AlgebraError, Rational, TruncatedSeries};
use crate::curve::{build_frame, find_branchpoints, BranchFrame, SpectralCurve};
use crate::recursion::{BasisForm, CorrelatorTensor};

const START_ORDER: i64 = 24;
const RETRIES: u32 = 4;

/// Two-fold residue evaluation of `ω_2^(1)`, written against the branch
/// frames only.
pub fn omega21_direct(curve: &SpectralCurve) -> Result<CorrelatorTensor, OracleError> {
    let points = find_branchpoints(curve)?;
    let mut order = START_ORDER;
    for attempt in 0.. {
        match Direct::new(curve, &points, order).and_then(|d| d.omega21()) {
            Err(OracleError::Algebra(AlgebraError::OrderUnderflow { .. })) if attempt < RETRIES => order *= 2,
            other => return other,
        }
    }
    unreachable!()
}

struct Point {
    frame: BranchFrame,
    /// `1/(-2 Δy ρ)`: the kernel denominator.
    inv_den: TruncatedSeries,
}

struct Direct<'a> {
    points: &'a [Rational],
    local: Vec<Point>,
}

type Key = Vec<BasisForm>;

impl<'a> Direct<'a> {
    fn new(curve: &SpectralCurve, points: &'a [Rational], order: i64) -> Result<Self, OracleError> {
        let mut local = Vec::new();
        for a in points {
            let frame = build_frame(curve, a, order)?;
            let den = (&frame.delta_y * &frame.rho).scale(&rat(-2));
            let inv_den = den.inv()?;
            local.push(Point { frame, inv_den });
        }
        Ok(Self { points, local })
    }

    fn s(&self, i: usize) -> TruncatedSeries {
        TruncatedSeries::monomial(Rational::one(), 1, self.local[i].frame.order)
    }

    /// Coefficient of `dζ0/(ζ0 - a_i)^m` in `K(ζ0, a_i + s)`, per `ds`.
    fn kernel(&self, i: usize, m: u32) -> Result<TruncatedSeries, AlgebraError> {
        let p = &self.local[i];
        let e = m as i64 - 1;
        let diff = &self.s(i).pow(e)? - &p.frame.sigma.pow(e)?;
        Ok(&diff * &p.inv_den)
    }

    /// `dζ/(ζ - a_j)^m` at `ζ = a_i + u`, per `ds`, with `u = s` or `u = σ(s)`.
    fn basis_at(&self, i: usize, f: BasisForm, conjugate: bool) -> Result<TruncatedSeries, AlgebraError> {
        let p = &self.local[i];
        let (u, du) = if conjugate {
            (p.frame.sigma.clone(), p.frame.sigma_prime.clone())
        } else {
            (self.s(i), TruncatedSeries::one(p.frame.order))
        };
        let shift = &self.points[i] - &self.points[f.point];
        let base = &u + &TruncatedSeries::monomial(shift, 0, u.order());
        Ok(&base.pow(-(f.order as i64))? * &du)
    }

    /// Coefficient of `dζ/(ζ - a_i)^m` in `B(a_i + u, ζ)`, per `ds`.
    fn bergman_coeff(&self, i: usize, m: u32, conjugate: bool) -> Result<TruncatedSeries, AlgebraError> {
        let p = &self.local[i];
        let c = rat(m as i64 - 1);
        if conjugate {
            Ok(&p.frame.sigma.pow(m as i64 - 2)?.scale(&c) * &p.frame.sigma_prime)
        } else {
            Ok(TruncatedSeries::monomial(c, m as i64 - 2, p.frame.order))
        }
    }

    /// `B(z, z̄)` per `ds²`.
    fn bergman_diagonal(&self, i: usize) -> Result<TruncatedSeries, AlgebraError> {
        let p = &self.local[i];
        let d = &self.s(i) - &p.frame.sigma;
        Ok(&(&d * &d).inv()? * &p.frame.sigma_prime)
    }

    fn omega03(&self) -> Result<CorrelatorTensor, OracleError> {
        let mut t = CorrelatorTensor::new(0, 3, self.points.to_vec());
        for i in 0..self.local.len() {
            // valuations m0 - 3, m1 - 2, m2 - 2 must reach -1
            for m0 in 2..=2u32 {
                let k = self.kernel(i, m0)?;
                for m1 in 2..=2u32 {
                    for m2 in 2..=2u32 {
                        let pair = &(&self.bergman_coeff(i, m1, false)? * &self.bergman_coeff(i, m2, true)?)
                            + &(&self.bergman_coeff(i, m2, false)? * &self.bergman_coeff(i, m1, true)?);
                        let r = (&k * &pair).residue()?;
                        t.add(vec![BasisForm::new(i, m0), BasisForm::new(i, m1), BasisForm::new(i, m2)], r);
                    }
                }
            }
        }
        Ok(t)
    }

    fn omega11(&self) -> Result<CorrelatorTensor, OracleError> {
        let mut t = CorrelatorTensor::new(1, 1, self.points.to_vec());
        for i in 0..self.local.len() {
            let b = self.bergman_diagonal(i)?;
            for m0 in 2..=4u32 {
                let r = (&self.kernel(i, m0)? * &b).residue()?;
                t.add(vec![BasisForm::new(i, m0)], r);
            }
        }
        Ok(t)
    }

    /// Sum of `c Π basis_at` over the tensor, the listed slots evaluated at
    /// `a_i + s` or `a_i + σ`, the remaining slots kept.
    fn restrict(
        &self,
        t: &CorrelatorTensor,
        i: usize,
        slots: &[bool],
    ) -> Result<BTreeMap<Key, TruncatedSeries>, AlgebraError> {
        let mut out: BTreeMap<Key, TruncatedSeries> = BTreeMap::new();
        for (key, c) in &t.entries {
            let mut series = TruncatedSeries::monomial(c.clone(), 0, self.local[i].frame.order);
            for (f, &conj) in key.iter().zip(slots) {
                series = &series * &self.basis_at(i, *f, conj)?;
            }
            let rest = key[slots.len()..].to_vec();
            match out.get_mut(&rest) {
                Some(acc) => *acc = &*acc + &series,
                None => {
                    out.insert(rest, series);
                }
            }
        }
        Ok(out)
    }

    fn omega21(&self) -> Result<CorrelatorTensor, OracleError> {
        let w03 = self.omega03()?;
        let w11 = self.omega11()?;
        let mut t = CorrelatorTensor::new(1, 2, self.points.to_vec());
        for i in 0..self.local.len() {
            // ω_3^(0)(z, z̄, ·)
            let inner = self.restrict(&w03, i, &[false, true])?;
            let at_z = self.restrict(&w11, i, &[false])?.remove(&Vec::new());
            let at_zbar = self.restrict(&w11, i, &[true])?.remove(&Vec::new());
            let zero = TruncatedSeries::zero(self.local[i].frame.order);
            let (at_z, at_zbar) = (at_z.unwrap_or_else(|| zero.clone()), at_zbar.unwrap_or(zero));
            for m0 in 2..=6u32 {
                let k = self.kernel(i, m0)?;
                for (rest, series) in &inner {
                    let r = (&k * series).residue()?;
                    let mut key = vec![BasisForm::new(i, m0)];
                    key.extend(rest.iter().copied());
                    t.add(key, r);
                }
                for m2 in 2..=(8 - m0).max(2) {
                    let b = &(&at_z * &self.bergman_coeff(i, m2, true)?)
                        + &(&at_zbar * &self.bergman_coeff(i, m2, false)?);
                    let r = (&k * &b).residue()?;
                    if !r.is_zero() {
                        t.add(vec![BasisForm::new(i, m0), BasisForm::new(i, m2)], r);
                    }
                }
            }
        }
        Ok(t)
    }
}
