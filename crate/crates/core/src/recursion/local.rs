//! Branch-local expansions feeding the residues: kernel families, basis
//! forms evaluated at `z = a + s` and `z̄ = a + σ(s)`, and the unstable
//! Bergman pieces.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use super::tensor::BasisForm;
use crate::algebra::{binomial, pow, rat, AlgebraError, Rational, TruncatedSeries};
use crate::curve::BranchFrame;

/// Which of the two preimages a slot is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheet {
    Z,
    ZBar,
}

pub struct LocalData {
    pub index: usize,
    pub frame: BranchFrame,
    /// Locations of every branch point, indexed like [`BasisForm::point`].
    points: Vec<Rational>,
    /// `σ'(s) / (2 Δy(s) ρ(a + s))`.
    prefactor: TruncatedSeries,
    sigma_powers: Mutex<Vec<Arc<TruncatedSeries>>>,
    kernels: Mutex<BTreeMap<u32, Arc<TruncatedSeries>>>,
    forms: Mutex<BTreeMap<(BasisForm, Sheet), Arc<TruncatedSeries>>>,
}

impl LocalData {
    pub fn new(index: usize, frame: BranchFrame, points: Vec<Rational>) -> Result<Self, AlgebraError> {
        let denom = (&frame.delta_y * &frame.rho).scale(&rat(2));
        let prefactor = frame.sigma_prime.div(&denom)?;
        let one = TruncatedSeries::one(frame.order);
        Ok(Self {
            index,
            points,
            prefactor,
            sigma_powers: Mutex::new(vec![Arc::new(one)]),
            kernels: Mutex::new(BTreeMap::new()),
            forms: Mutex::new(BTreeMap::new()),
            frame,
        })
    }

    pub fn order(&self) -> i64 {
        self.frame.order
    }

    pub fn sigma_pow(&self, k: usize) -> Arc<TruncatedSeries> {
        let mut cache = self.sigma_powers.lock().expect("poisoned");
        while cache.len() <= k {
            let next = cache.last().expect("seeded").as_ref() * &self.frame.sigma;
            cache.push(Arc::new(next));
        }
        cache[k].clone()
    }

    /// Coefficient of `dζ0/(ζ0 - a)^m` in the kernel, with the `dσ/ds` of the
    /// conjugate slot folded in.
    pub fn kernel(&self, m: u32) -> Arc<TruncatedSeries> {
        if let Some(k) = self.kernels.lock().expect("poisoned").get(&m) {
            return k.clone();
        }
        let order = self.order();
        let s_pow = TruncatedSeries::monomial(Rational::one(), m as i64 - 1, order + m as i64);
        let diff = self.sigma_pow(m as usize - 1).as_ref() - &s_pow;
        let k = Arc::new(&diff * &self.prefactor);
        self.kernels.lock().expect("poisoned").insert(m, k.clone());
        k
    }

    /// `1/(ζ - a_k)^m` at `ζ = a + s` or `ζ = a + σ(s)`.
    pub fn form(&self, f: BasisForm, sheet: Sheet) -> Result<Arc<TruncatedSeries>, AlgebraError> {
        if let Some(v) = self.forms.lock().expect("poisoned").get(&(f, sheet)) {
            return Ok(v.clone());
        }
        let order = self.order();
        let m = f.order as i64;
        let value = if f.point == self.index {
            match sheet {
                Sheet::Z => TruncatedSeries::monomial(Rational::one(), -m, order),
                Sheet::ZBar => self.frame.sigma.pow(-m)?,
            }
        } else {
            let d = &self.frame.a - &self.points[f.point];
            // (d + t)^-m
            let coeffs = (0..order)
                .map(|j| {
                    let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
                    sign * binomial(m + j - 1, j) * pow(&d, -m - j).expect("nonzero offset")
                })
                .collect();
            let series = TruncatedSeries::new(0, coeffs, order);
            match sheet {
                Sheet::Z => series,
                Sheet::ZBar => series.compose(&self.frame.sigma)?,
            }
        };
        let value = Arc::new(value);
        self.forms
            .lock()
            .expect("poisoned")
            .insert((f, sheet), value.clone());
        Ok(value)
    }

    /// `B(ζ_j, ·)` at one sheet: coefficient of `dζ_j/(ζ_j - a)^m` is
    /// `(m - 1) w^(m-2)` with `w = s` or `σ(s)`.
    pub fn bergman_term(&self, m: u32, sheet: Sheet) -> TruncatedSeries {
        let c = rat(m as i64 - 1);
        match sheet {
            Sheet::Z => TruncatedSeries::monomial(c, m as i64 - 2, self.order() + m as i64),
            Sheet::ZBar => self.sigma_pow(m as usize - 2).scale(&c),
        }
    }

    /// `B(z, z̄)` with both differentials stripped: `1/(s - σ(s))²`.
    pub fn bergman_diagonal(&self) -> Result<TruncatedSeries, AlgebraError> {
        let s = TruncatedSeries::monomial(Rational::one(), 1, self.order() + 1);
        (&s - &self.frame.sigma).pow(-2)
    }

    pub fn phi_coeff(&self, k: i64) -> Result<Rational, AlgebraError> {
        if k < 0 {
            return Ok(Rational::zero());
        }
        self.frame.phi.coeff(k)
    }
}
