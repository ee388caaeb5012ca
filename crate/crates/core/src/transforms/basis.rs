use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{ExpansionReport, ReportIndex, ReportKind, TransformError};
use crate::algebra::{factorial, pow, rat, Rational, TruncatedSeries};
use crate::curve::BranchFrame;
use crate::recursion::{CorrelatorTensor, Engine};

/// `z(s) = √X(s)` with positive leading coefficient.
fn square_root_coordinate(frame: &BranchFrame) -> Result<TruncatedSeries, TransformError> {
    let q = frame.x_off.leading().cloned().unwrap_or_else(Rational::zero);
    frame.x_off.sqrt().map_err(|_| TransformError::NotASquare {
        point: frame.a.clone(),
        q,
    })
}

/// `β_{k,m}`: coefficient of `dζ/(ζ - a)^m` in `B_{a,k} = Res_{ζ'→a} B(ζ, ζ') z(ζ')^(-2k-1)`.
struct BasisTable {
    beta: BTreeMap<(i64, u32), Rational>,
}

impl BasisTable {
    fn new(z: &TruncatedSeries, max_k: i64) -> Result<Self, TransformError> {
        let mut beta = BTreeMap::new();
        for k in 0..=max_k {
            let p = z.pow(-2 * k - 1)?;
            for m in 2..=(2 * k + 2) as u32 {
                let c = p.coeff(1 - m as i64)? * rat(m as i64 - 1);
                if !c.is_zero() {
                    beta.insert((k, m), c);
                }
            }
        }
        Ok(Self { beta })
    }

    fn get(&self, k: i64, m: u32) -> Rational {
        self.beta.get(&(k, m)).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Coefficients `A` over products of `B_{a,k}`, one factor per slot.
///
/// Each branch point contributes its `q` (leading coefficient of `x - x(a)`),
/// recorded in the notes: `z = √X` is rational only when `q` is a square.
pub fn basis_decomposition(engine: &Engine, t: &CorrelatorTensor) -> Result<ExpansionReport, TransformError> {
    let max_m = t.max_pole_order().max(2);
    let max_k = (max_m as i64 - 2) / 2 + 1;
    let frames = engine.frames((2 * max_m as i64 + 6).max(engine.base_order(t.g, t.n)))?;
    let used: std::collections::BTreeSet<usize> = t.entries.keys().flatten().map(|f| f.point).collect();
    let mut tables: BTreeMap<usize, BasisTable> = BTreeMap::new();
    let mut report = ExpansionReport::new(ReportKind::BasisA);
    report.points = t.branch_points.clone();
    for &p in &used {
        let frame = &frames[p].frame;
        let z = square_root_coordinate(frame)?;
        report.notes.insert(
            format!("q[{}]", frame.a),
            frame.x_off.leading().expect("valuation 2").to_string(),
        );
        tables.insert(p, BasisTable::new(&z, max_k)?);
    }

    // slot by slot: pole orders m are replaced by basis indices k
    let mut current: BTreeMap<Vec<(usize, i64)>, Rational> = t
        .entries
        .iter()
        .map(|(k, v)| (k.iter().map(|f| (f.point, f.order as i64)).collect(), v.clone()))
        .collect();
    for slot in 0..t.n as usize {
        let mut groups: BTreeMap<(Vec<(usize, i64)>, usize), BTreeMap<i64, Rational>> = BTreeMap::new();
        for (key, v) in current {
            let (p, m) = key[slot];
            let mut rest = key.clone();
            rest[slot] = (p, -1);
            groups.entry((rest, p)).or_default().insert(m, v);
        }
        let mut next = BTreeMap::new();
        for ((rest, p), mut by_m) in groups {
            let table = &tables[&p];
            while let Some((&m, c)) = by_m.iter().next_back() {
                let c = c.clone();
                if m % 2 != 0 || m < 2 {
                    return Err(TransformError::Residual {
                        point: t.branch_points[p].clone(),
                        order: m as u32,
                    });
                }
                let k = (m - 2) / 2;
                let a = &c / table.get(k, m as u32);
                for mm in 2..=m {
                    let b = table.get(k, mm as u32);
                    if b.is_zero() {
                        continue;
                    }
                    let slot_value = by_m.entry(mm).or_insert_with(Rational::zero);
                    *slot_value -= &a * b;
                    if slot_value.is_zero() {
                        by_m.remove(&mm);
                    }
                }
                let mut key = rest.clone();
                key[slot] = (p, k);
                next.insert(key, a);
            }
        }
        current = next;
    }
    for (key, v) in current {
        report.values.insert(
            ReportIndex {
                at: key.iter().map(|x| x.0).collect(),
                k: key.iter().map(|x| x.1).collect(),
            },
            v,
        );
    }
    Ok(report)
}

/// Times from `y - ȳ` written as an odd series in `z`, normalised to `2z + ...`.
pub fn times_from_delta(delta: &TruncatedSeries) -> Result<ExpansionReport, TransformError> {
    let c1 = delta.coeff(1)?;
    if c1.is_zero() || delta.valuation() != 1 {
        return Err(TransformError::Precondition("y - ȳ must start at z^1".into()));
    }
    let lambda = rat(2) / &c1;
    let mut report = ExpansionReport::new(ReportKind::KontsevichTimes);
    report.notes.insert("lambda".into(), lambda.to_string());
    report.values.insert(ReportIndex::plain(vec![1]), Rational::zero());
    report.values.insert(ReportIndex::plain(vec![3]), Rational::zero());
    let mut k = 2;
    while 2 * k - 1 < delta.order() {
        let c = delta.coeff(2 * k - 1)?;
        report
            .values
            .insert(ReportIndex::plain(vec![2 * k + 1]), -&lambda * c);
        k += 1;
    }
    Ok(report)
}

/// Kontsevich times `t_{2k+1}` at a branch point, after `ŷ = λ y` makes the
/// leading term `2z`.
pub fn extract_times(frame: &BranchFrame) -> Result<ExpansionReport, TransformError> {
    let z = square_root_coordinate(frame)?;
    let s_of_z = z.reversion()?;
    let delta = frame.delta_y.compose(&s_of_z)?;
    for j in (0..delta.order()).step_by(2) {
        if !delta.coeff(j)?.is_zero() {
            return Err(TransformError::Precondition(format!(
                "y - ȳ is not odd in z (coefficient of z^{j})"
            )));
        }
    }
    let mut report = times_from_delta(&delta)?;
    report.notes.insert("q".into(), frame.x_off.leading().expect("valuation 2").to_string());
    report.notes.insert("a".into(), frame.a.to_string());
    Ok(report)
}

/// Dual times `t̃_b` from `t̃(z) = -ln(1 - f(z))`,
/// `f(z) = Σ_{a≥1} ((2a+1)!/a!) t_{2a+3}/(2 - t_3) z^a`.
pub fn dual_times(times: &ExpansionReport) -> Result<ExpansionReport, TransformError> {
    let t = |j: i64| times.get(&[j]).cloned().unwrap_or_else(Rational::zero);
    let t3 = t(3);
    if !t3.is_zero() {
        return Err(TransformError::Precondition(
            "t_3 ≠ 0 makes t̃_0 = -ln(1 - t_3/2) irrational".into(),
        ));
    }
    let top = times
        .values
        .keys()
        .filter_map(|i| i.k.first().copied())
        .max()
        .unwrap_or(3);
    // t_{2a+3} known for a ≤ (top - 3)/2
    let max_a = ((top - 3) / 2).max(0);
    let two_minus = rat(2) - &t3;
    let coeffs: Vec<Rational> = (1..=max_a)
        .map(|a| factorial(2 * a as u64 + 1) / factorial(a as u64) * t(2 * a + 3) / &two_minus)
        .collect();
    let order = max_a + 1;
    let f = TruncatedSeries::new(1, coeffs, order);
    let one_minus = &TruncatedSeries::one(order) - &f;
    let tilde = one_minus.log()?.scale(&-Rational::one());
    let mut report = ExpansionReport::new(ReportKind::DualTimes);
    for b in 0..order {
        report.values.insert(ReportIndex::plain(vec![b]), tilde.coeff(b)?);
    }
    Ok(report)
}

/// `⟨Π τ_{k_i}⟩_g` from `ω_n^(g)` on a curve with one branch point and vanishing times.
pub fn intersection_numbers(engine: &Engine, g: u32, n: u32) -> Result<ExpansionReport, TransformError> {
    if engine.branch_points().len() != 1 {
        return Err(TransformError::Precondition(format!(
            "intersection numbers need exactly one branch point, found {}",
            engine.branch_points().len()
        )));
    }
    let t = engine.correlator(g, n)?;
    let frames = engine.frames((2 * t.max_pole_order() as i64 + 6).max(engine.base_order(g, n)))?;
    let times = extract_times(&frames[0].frame)?;
    if let Some((i, v)) = times.values.iter().find(|(_, v)| !v.is_zero()) {
        return Err(TransformError::Precondition(format!(
            "nonzero time t_{} = {v}",
            i.k[0]
        )));
    }
    let lambda: Rational = crate::algebra::parse_rational(&times.notes["lambda"])?;
    let a = basis_decomposition(engine, &t)?;
    let chi = 2 - 2 * g as i64 - n as i64;
    let d = 3 * g as i64 - 3 + n as i64;
    let scale = pow(&lambda, chi)? * pow(&rat(2), d - chi)?;
    let mut report = ExpansionReport::new(ReportKind::IntersectionNumbers);
    report.notes.insert("lambda".into(), lambda.to_string());
    for (idx, v) in &a.values {
        if idx.k.iter().sum::<i64>() != d {
            return Err(TransformError::Precondition(format!(
                "coefficient {v} at k = {:?} violates Σk = {d}",
                idx.k
            )));
        }
        let mut value = v * &scale;
        for &k in &idx.k {
            value *= rat(2 * k + 1) * factorial(k as u64) / factorial(2 * k as u64 + 1);
        }
        report.values.insert(ReportIndex::plain(idx.k.clone()), value);
    }
    Ok(report)
}
