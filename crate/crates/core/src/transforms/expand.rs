use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{ExpansionReport, IndexConvention, ReportIndex, ReportKind, TransformError, WeightFunction};
use crate::algebra::{binomial, pow, AlgebraError, Rational, RationalFunction, TruncatedSeries};
use crate::curve::{ChartPoint, SpectralCurve};
use crate::recursion::{basis_form_at, omega01, BasisForm, CorrelatorTensor};

const RETRIES: u32 = 6;

/// What is being re-expanded.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    /// The generating function `W_1^(0) = y dx`.
    Disc(&'a SpectralCurve),
    /// `ω_1^(0) = -y dx`.
    Omega01(&'a SpectralCurve),
    /// `ω_2^(0)`, at two distinct finite points.
    Bergman,
    Tensor(&'a CorrelatorTensor),
    /// The generating function `W_n^(g) = (-1)^n ω_n^(g)` of a stable correlator.
    Generating(&'a CorrelatorTensor),
}

impl Target<'_> {
    fn slots(&self) -> usize {
        match self {
            Target::Disc(_) | Target::Omega01(_) => 1,
            Target::Bergman => 2,
            Target::Tensor(t) | Target::Generating(t) => t.n as usize,
        }
    }
}

fn chart_expand(f: &RationalFunction, point: &ChartPoint, order: i64) -> Result<TruncatedSeries, AlgebraError> {
    match point {
        ChartPoint::Finite(p) => f.expand_at(p, order),
        ChartPoint::Infinity => f.expand_at_infinity(order),
    }
}

/// Local form of a weight: the series `f(t)`, its valuation, and `Q(p)`.
struct LocalWeight {
    f: TruncatedSeries,
    valuation: i64,
    q0: Rational,
    index: IndexConvention,
    powers: BTreeMap<i64, TruncatedSeries>,
}

impl LocalWeight {
    fn new(w: &WeightFunction, precision: i64) -> Result<Self, TransformError> {
        if w.rational.is_zero() {
            return Err(TransformError::BadWeight("weight vanishes identically".into()));
        }
        let probe = chart_expand(&w.rational, &w.point, precision)?;
        let valuation = probe.valuation();
        if valuation == 0 {
            return Err(TransformError::BadWeight(format!(
                "weight has valuation 0 at {}; it must vanish or diverge there",
                w.point
            )));
        }
        let r = chart_expand(&w.rational, &w.point, valuation + precision)?;
        let (f, q0) = if w.exponent.is_zero() {
            (r, Rational::zero())
        } else {
            let q = chart_expand(&w.exponent, &w.point, precision)?;
            if q.valuation() < 0 {
                return Err(TransformError::BadWeight(format!(
                    "exponential part is singular at {}",
                    w.point
                )));
            }
            let q0 = q.coeff(0)?;
            let shifted = &q - &TruncatedSeries::monomial(q0.clone(), 0, q.order());
            (&r * &shifted.exp()?, q0)
        };
        Ok(Self {
            f,
            valuation,
            q0,
            index: w.index,
            powers: BTreeMap::new(),
        })
    }

    fn exponent(&self, k: i64) -> i64 {
        match self.index {
            IndexConvention::Power => k,
            IndexConvention::Winding => -k,
        }
    }

    fn power(&mut self, e: i64) -> Result<&TruncatedSeries, AlgebraError> {
        if !self.powers.contains_key(&e) {
            let p = self.f.pow(e)?;
            self.powers.insert(e, p);
        }
        Ok(&self.powers[&e])
    }

    /// `Res_t (form · f^e(k)) / v`.
    fn project(&mut self, form: &TruncatedSeries, k: i64) -> Result<Rational, AlgebraError> {
        let v = Rational::from_integer(self.valuation.into());
        let e = self.exponent(k);
        let p = self.power(e)?;
        Ok(form.mul_capped(p, 0).residue()? / v)
    }

    /// `[t^j] f^e(k) / v`.
    fn coefficient(&mut self, j: i64, k: i64) -> Result<Rational, AlgebraError> {
        let v = Rational::from_integer(self.valuation.into());
        let e = self.exponent(k);
        Ok(self.power(e)?.coeff(j)? / v)
    }
}

fn disc_series(curve: &SpectralCurve, point: &ChartPoint, order: i64, sign: i64) -> Result<TruncatedSeries, AlgebraError> {
    let mut w = omega01(curve);
    if sign > 0 {
        w = -&w;
    }
    match point {
        ChartPoint::Finite(p) => w.expand_at(p, order),
        // dζ = -dt/t²
        ChartPoint::Infinity => Ok(w.expand_at_infinity(order + 2)?.shift(-2).scale(&-Rational::one())),
    }
}

/// Coefficients `Ã` of the target in powers of the weights, for every index
/// tuple in `window` (inclusive) per slot.
///
/// `weights` holds one weight per slot, or a single weight used for all slots.
pub fn expand_at_point(
    target: &Target,
    weights: &[WeightFunction],
    window: (i64, i64),
) -> Result<ExpansionReport, TransformError> {
    let n = target.slots();
    let weights: Vec<&WeightFunction> = match weights.len() {
        1 => vec![&weights[0]; n],
        k if k == n => weights.iter().collect(),
        k => {
            return Err(TransformError::Precondition(format!(
                "{k} weights supplied for {n} slots"
            )))
        }
    };
    let (lo, hi) = window;
    if lo > hi {
        return Err(TransformError::Precondition(format!("empty window {lo}..{hi}")));
    }
    let max_pole = match target {
        Target::Tensor(t) | Target::Generating(t) => t.max_pole_order() as i64,
        _ => 2,
    };
    let mut precision = (hi - lo).abs() + lo.abs().max(hi.abs()) + max_pole + 8;
    let mut attempt = 0;
    loop {
        match expand_once(target, &weights, window, precision) {
            Err(TransformError::Algebra(AlgebraError::OrderUnderflow { .. })) if attempt < RETRIES => {
                attempt += 1;
                precision *= 2;
            }
            other => return other,
        }
    }
}

fn expand_once(
    target: &Target,
    weights: &[&WeightFunction],
    (lo, hi): (i64, i64),
    precision: i64,
) -> Result<ExpansionReport, TransformError> {
    let n = weights.len();
    let mut locals: Vec<LocalWeight> = weights
        .iter()
        .map(|w| LocalWeight::new(w, precision))
        .collect::<Result<_, _>>()?;
    let mut report = ExpansionReport::new(ReportKind::TildeA);
    for (i, (w, l)) in weights.iter().zip(&locals).enumerate() {
        report.notes.insert(format!("slot{i}.point"), w.point.to_string());
        report.notes.insert(format!("slot{i}.valuation"), l.valuation.to_string());
        report.notes.insert(format!("slot{i}.index"), format!("{:?}", l.index).to_lowercase());
        if !l.q0.is_zero() {
            report
                .notes
                .insert(format!("slot{i}.weight_scale"), format!("exp({})", l.q0));
        }
    }
    let tuples = index_tuples(n, lo, hi);

    match target {
        Target::Disc(curve) | Target::Omega01(curve) => {
            let sign = if matches!(target, Target::Disc(_)) { 1 } else { -1 };
            let w = disc_series(curve, &weights[0].point, precision, sign)?;
            for t in tuples {
                let v = locals[0].project(&w, t[0])?;
                insert(&mut report, t, v);
            }
        }
        Target::Bergman => {
            let (p1, p2) = match (&weights[0].point, &weights[1].point) {
                (ChartPoint::Finite(a), ChartPoint::Finite(b)) if a != b => (a.clone(), b.clone()),
                _ => {
                    return Err(TransformError::Precondition(
                        "the Bergman kernel is expanded at two distinct finite points".into(),
                    ))
                }
            };
            let d = &p1 - &p2;
            for t in tuples {
                // a, b range over the monomials t1^a t2^b that can meet a pole of f^e
                let top = |l: &LocalWeight, k: i64| -1 - l.exponent(k) * l.valuation;
                let (ta, tb) = (top(&locals[0], t[0]), top(&locals[1], t[1]));
                let mut acc = Rational::zero();
                for a in 0..=ta {
                    let ra = locals[0].coefficient(-1 - a, t[0])?;
                    if ra.is_zero() {
                        continue;
                    }
                    for b in 0..=tb {
                        let rb = locals[1].coefficient(-1 - b, t[1])?;
                        if rb.is_zero() {
                            continue;
                        }
                        let j = a + b;
                        let sign = if (j + b) % 2 == 0 { Rational::one() } else { -Rational::one() };
                        let c = sign
                            * Rational::from_integer((j + 1).into())
                            * binomial(j, a)
                            * pow(&d, -j - 2)?;
                        acc += c * &ra * &rb;
                    }
                }
                insert(&mut report, t, acc);
            }
        }
        Target::Tensor(tensor) | Target::Generating(tensor) => {
            let sign = if matches!(target, Target::Generating(_)) && tensor.n % 2 == 1 {
                -Rational::one()
            } else {
                Rational::one()
            };
            let mut forms: BTreeMap<(usize, BasisForm), TruncatedSeries> = BTreeMap::new();
            let mut beta: BTreeMap<(usize, BasisForm, i64), Rational> = BTreeMap::new();
            for (key, _) in &tensor.entries {
                for (i, f) in key.iter().enumerate() {
                    if !forms.contains_key(&(i, *f)) {
                        let a = &tensor.branch_points[f.point];
                        let s = basis_form_at(a, f.order, &weights[i].point, precision)?;
                        forms.insert((i, *f), s);
                    }
                    for k in lo..=hi {
                        if !beta.contains_key(&(i, *f, k)) {
                            let v = locals[i].project(&forms[&(i, *f)], k)?;
                            beta.insert((i, *f, k), v);
                        }
                    }
                }
            }
            for t in tuples {
                let mut acc = Rational::zero();
                for (key, c) in &tensor.entries {
                    let mut term = c.clone();
                    for (i, f) in key.iter().enumerate() {
                        let b = &beta[&(i, *f, t[i])];
                        if b.is_zero() {
                            term = Rational::zero();
                            break;
                        }
                        term *= b;
                    }
                    acc += term;
                }
                insert(&mut report, t, acc * &sign);
            }
        }
    }
    Ok(report)
}

fn insert(report: &mut ExpansionReport, k: Vec<i64>, v: Rational) {
    report.values.insert(ReportIndex::plain(k), v);
}

fn index_tuples(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (lo..=hi).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}
