use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, RwLock};

use num_traits::Zero;
use rayon::prelude::*;

use super::local::{LocalData, Sheet};
use super::tensor::{BasisForm, CorrelatorTensor};
use super::{is_stable, EngineError};
use crate::algebra::{AlgebraError, Rational, TruncatedSeries};
use crate::curve::{build_frame, find_branchpoints, SpectralCurve};

type Key = Vec<BasisForm>;
type SeriesMap = BTreeMap<Key, TruncatedSeries>;

/// Order cap for the bracket: coefficients up to `s^0` are all the kernel can see.
const BRACKET_ORDER: i64 = 1;
const RETRIES: u32 = 6;

/// One factor of a product term in the bracket.
enum Factor {
    /// `ω_2^(0)(w, ζ_j)`.
    Bergman,
    Tensor(Arc<CorrelatorTensor>),
}

/// Memoised recursion over one curve.
pub struct Engine {
    curve: SpectralCurve,
    branch_points: Vec<Rational>,
    order_override: Option<i64>,
    parallel: bool,
    frames: Mutex<BTreeMap<i64, Arc<Vec<LocalData>>>>,
    memo: RwLock<BTreeMap<(u32, u32), (Arc<CorrelatorTensor>, i64)>>,
}

impl Engine {
    pub fn new(curve: SpectralCurve) -> Result<Self, EngineError> {
        let branch_points = find_branchpoints(&curve)?;
        Ok(Self {
            curve,
            branch_points,
            order_override: None,
            parallel: true,
            frames: Mutex::new(BTreeMap::new()),
            memo: RwLock::new(BTreeMap::new()),
        })
    }

    /// Minimum frame order, raised per request to `6g - 2 + 2n` when lower.
    pub fn with_order(mut self, order: Option<i64>) -> Self {
        self.order_override = order;
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn curve(&self) -> &SpectralCurve {
        &self.curve
    }

    pub fn branch_points(&self) -> &[Rational] {
        &self.branch_points
    }

    pub fn base_order(&self, g: u32, n: u32) -> i64 {
        let needed = 6 * g as i64 - 2 + 2 * n as i64;
        self.order_override.unwrap_or(0).max(needed).max(4)
    }

    pub fn frames(&self, order: i64) -> Result<Arc<Vec<LocalData>>, EngineError> {
        if let Some(f) = self.frames.lock().expect("poisoned").get(&order) {
            return Ok(f.clone());
        }
        let build = |(i, a): (usize, &Rational)| -> Result<LocalData, EngineError> {
            let frame = build_frame(&self.curve, a, order)?;
            Ok(LocalData::new(i, frame, self.branch_points.clone())?)
        };
        let data: Vec<LocalData> = if self.parallel {
            self.branch_points.par_iter().enumerate().map(build).collect::<Result<_, _>>()?
        } else {
            self.branch_points.iter().enumerate().map(build).collect::<Result<_, _>>()?
        };
        let data = Arc::new(data);
        self.frames.lock().expect("poisoned").insert(order, data.clone());
        Ok(data)
    }

    /// Frame order the cached `(g, n)` tensor was obtained with.
    pub fn order_used(&self, g: u32, n: u32) -> Option<i64> {
        self.memo.read().expect("poisoned").get(&(g, n)).map(|v| v.1)
    }

    /// `ω_n^(g)` for stable `(g, n)`, computing and caching every dependency.
    pub fn correlator(&self, g: u32, n: u32) -> Result<Arc<CorrelatorTensor>, EngineError> {
        if !is_stable(g, n) {
            return Err(EngineError::Unstable { g, n });
        }
        if let Some(t) = self.memo.read().expect("poisoned").get(&(g, n)) {
            return Ok(t.0.clone());
        }
        let r = n - 1;
        if g >= 1 && is_stable(g - 1, r + 2) {
            self.correlator(g - 1, r + 2)?;
        }
        for h in 0..=g {
            for k in 0..=r {
                if (h == 0 && k == 0) || (h == g && k == r) {
                    continue;
                }
                if is_stable(h, k + 1) {
                    self.correlator(h, k + 1)?;
                }
                if is_stable(g - h, r - k + 1) {
                    self.correlator(g - h, r - k + 1)?;
                }
            }
        }
        let mut order = self.base_order(g, n);
        let mut attempt = 0;
        let tensor = loop {
            let frames = self.frames(order)?;
            match self.step(g, n, &frames) {
                Ok(t) => break t,
                Err(EngineError::Algebra(AlgebraError::OrderUnderflow { .. })) if attempt < RETRIES => {
                    attempt += 1;
                    order *= 2;
                }
                Err(EngineError::Algebra(AlgebraError::OrderUnderflow { .. })) => {
                    return Err(EngineError::OrderUnderflow { g, n, order });
                }
                Err(e) => return Err(e),
            }
        };
        let tensor = Arc::new(tensor);
        self.memo
            .write()
            .expect("poisoned")
            .entry((g, n))
            .or_insert((tensor.clone(), order));
        Ok(tensor)
    }

    fn cached(&self, g: u32, n: u32) -> Factor {
        if g == 0 && n == 2 {
            return Factor::Bergman;
        }
        let memo = self.memo.read().expect("poisoned");
        Factor::Tensor(memo[&(g, n)].0.clone())
    }

    fn step(&self, g: u32, n: u32, frames: &[LocalData]) -> Result<CorrelatorTensor, EngineError> {
        let parts: Vec<CorrelatorTensor> = if self.parallel {
            frames.par_iter().map(|l| self.residue_at(g, n, l)).collect::<Result<_, _>>()?
        } else {
            frames.iter().map(|l| self.residue_at(g, n, l)).collect::<Result<_, _>>()?
        };
        let mut out = CorrelatorTensor::new(g, n, self.branch_points.clone());
        for p in parts {
            for (k, v) in p.entries {
                out.add(k, v);
            }
        }
        Ok(out)
    }

    /// `Res_{z→a} K(ζ0, z) [ω(z, z̄, J) + Σ' ω(z, I) ω(z̄, J∖I)]` at one branch point.
    fn residue_at(&self, g: u32, n: u32, local: &LocalData) -> Result<CorrelatorTensor, EngineError> {
        let r = (n - 1) as usize;
        let mut jobs: Vec<(u32, u32)> = Vec::new();
        for h in 0..=g {
            for mask in 0u32..(1 << r) {
                let full = mask == (1 << r) - 1;
                if (h == 0 && mask == 0) || (h == g && full) {
                    continue;
                }
                jobs.push((h, mask));
            }
        }
        let split = |&(h, mask): &(u32, u32)| self.split_term(g, h, mask, r, local);
        let mut brackets: Vec<SeriesMap> = if self.parallel {
            jobs.par_iter().map(split).collect::<Result<_, _>>()?
        } else {
            jobs.iter().map(split).collect::<Result<_, _>>()?
        };
        if g >= 1 {
            brackets.push(self.loop_term(g - 1, r, local)?);
        }
        let mut bracket = SeriesMap::new();
        for b in brackets {
            for (k, v) in b {
                accumulate(&mut bracket, k, v);
            }
        }

        let mut out = CorrelatorTensor::new(g, n, self.branch_points.clone());
        for (key, series) in bracket {
            if series.order() < BRACKET_ORDER {
                return Err(AlgebraError::OrderUnderflow {
                    required: BRACKET_ORDER,
                    available: series.order(),
                }
                .into());
            }
            if series.is_zero() {
                continue;
            }
            let top = 2 - series.valuation();
            for m0 in 2..=top.max(2) {
                let kernel = local.kernel(m0 as u32);
                let c = kernel.mul_capped(&series, 0).residue()?;
                if !c.is_zero() {
                    let mut full = Vec::with_capacity(n as usize);
                    full.push(BasisForm::new(local.index, m0 as u32));
                    full.extend_from_slice(&key);
                    out.add(full, c);
                }
            }
        }
        Ok(out)
    }

    /// `ω_{r+2}^(h)(z, z̄, J)`.
    fn loop_term(&self, h: u32, r: usize, local: &LocalData) -> Result<SeriesMap, EngineError> {
        let mut out = SeriesMap::new();
        let t = match self.cached(h, r as u32 + 2) {
            Factor::Bergman => {
                out.insert(Vec::new(), local.bergman_diagonal()?);
                return Ok(out);
            }
            Factor::Tensor(t) => t,
        };
        let mut inner: BTreeMap<(BasisForm, Key), TruncatedSeries> = BTreeMap::new();
        for (k, c) in &t.entries {
            let term = local.form(k[1], Sheet::ZBar)?.scale(c);
            accumulate(&mut inner, (k[0], k[2..].to_vec()), term);
        }
        for ((f0, rest), s) in inner {
            let prod = local.form(f0, Sheet::Z)?.mul_capped(&s, BRACKET_ORDER);
            accumulate(&mut out, rest, prod);
        }
        Ok(out)
    }

    /// `ω^(h)(z, ζ_I) ω^(g-h)(z̄, ζ_{J∖I})` with `I` the set bits of `mask`.
    fn split_term(
        &self,
        g: u32,
        h: u32,
        mask: u32,
        r: usize,
        local: &LocalData,
    ) -> Result<SeriesMap, EngineError> {
        let inside: Vec<usize> = (0..r).filter(|j| mask & (1 << j) != 0).collect();
        let outside: Vec<usize> = (0..r).filter(|j| mask & (1 << j) == 0).collect();
        let left = self.cached(h, inside.len() as u32 + 1);
        let right = self.cached(g - h, outside.len() as u32 + 1);

        let left_map = match &left {
            Factor::Tensor(t) => Some(first_slot(t, local, Sheet::Z)?),
            Factor::Bergman => None,
        };
        let right_map = match &right {
            Factor::Tensor(t) => Some(first_slot(t, local, Sheet::ZBar)?),
            Factor::Bergman => None,
        };
        let left_map = match left_map {
            Some(m) => m,
            None => bergman_map(local, Sheet::Z, min_valuation(right_map.as_ref())),
        };
        let right_map = match right_map {
            Some(m) => m,
            None => bergman_map(local, Sheet::ZBar, min_valuation(Some(&left_map))),
        };

        let mut out = SeriesMap::new();
        for (k1, s1) in &left_map {
            for (k2, s2) in &right_map {
                let mut key = vec![BasisForm::new(0, 0); r];
                for (pos, f) in inside.iter().zip(k1) {
                    key[*pos] = *f;
                }
                for (pos, f) in outside.iter().zip(k2) {
                    key[*pos] = *f;
                }
                accumulate(&mut out, key, s1.mul_capped(s2, BRACKET_ORDER));
            }
        }
        Ok(out)
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, TruncatedSeries>, key: K, value: TruncatedSeries) {
    if value.is_zero() && value.order() >= BRACKET_ORDER {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &value;
            *o.get_mut() = sum;
        }
    }
}

/// Sums the first slot of `t` at one sheet: map from the remaining slots to a series in `s`.
fn first_slot(t: &CorrelatorTensor, local: &LocalData, sheet: Sheet) -> Result<SeriesMap, EngineError> {
    let mut out = SeriesMap::new();
    for (k, c) in &t.entries {
        let term = local.form(k[0], sheet)?.scale(c);
        accumulate(&mut out, k[1..].to_vec(), term);
    }
    Ok(out)
}

/// `v_other` of the partner factor: the lowest power of `s` it can contribute.
fn min_valuation(map: Option<&SeriesMap>) -> i64 {
    map.map(|m| m.values().map(TruncatedSeries::valuation).min().unwrap_or(0))
        .unwrap_or(0)
}

/// Expansion of `B(w, ζ_j)` over the basis at this branch point, cut where the
/// partner's valuation and the kernel's (at least `s^-1`) put every later term
/// above the residue.
fn bergman_map(local: &LocalData, sheet: Sheet, partner: i64) -> SeriesMap {
    let top = 2 - partner;
    (2..=top.max(2))
        .map(|m| {
            (
                vec![BasisForm::new(local.index, m as u32)],
                local.bergman_term(m as u32, sheet),
            )
        })
        .collect()
}
