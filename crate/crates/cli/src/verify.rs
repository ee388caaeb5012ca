//! Verification suites: the engine's identities on any curve, plus oracle
//! comparisons for the shipped curves.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use toprec_core::algebra::{factorial, pow, rat, ratio, Rational, RationalFunction};
use toprec_core::curve::{builtin_curve, SpectralCurve, BUILTIN_CURVES};
use toprec_core::oracles::{
    genus0_one_part, normalized_hurwitz, omega21_direct, one_face_maps, tutte_disc, Partition, TauTable,
};
use toprec_core::recursion::{BasisForm, CorrelatorTensor, Engine};
use toprec_core::transforms::{expand_at_point, intersection_numbers, Target};

/// Stable (g, n) with 2g - 2 + n ≤ 4.
pub const STABLE: [(u32, u32); 10] = [(0, 3), (1, 1), (0, 4), (1, 2), (0, 5), (1, 3), (2, 1), (0, 6), (1, 4), (2, 2)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, result: Result<String, String>) -> Self {
        let (passed, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            write!(f, "{status} {}", self.name)
        } else {
            write!(f, "{status} {}: {}", self.name, self.detail)
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

type Outcome = Result<String, String>;

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn same_tensor(what: &str, a: &CorrelatorTensor, b: &CorrelatorTensor) -> Result<(), String> {
    match a.first_difference(b) {
        None => Ok(()),
        Some((key, x, y)) => {
            let poles: Vec<String> = key.iter().map(|f| format!("({},{})", a.branch_points[f.point], f.order)).collect();
            Err(format!("{what}: coefficient at [{}] is {x}, expected {y}", poles.join(",")))
        }
    }
}

fn equal(what: &str, got: &Rational, want: &Rational) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

fn engine(curve: &SpectralCurve, order: Option<i64>) -> Result<Engine, String> {
    Engine::new(curve.clone()).map(|e| e.with_order(order)).map_err(err)
}

fn symmetry(e: &Engine) -> Outcome {
    for (g, n) in STABLE {
        let t = e.correlator(g, n).map_err(err)?;
        let n = n as usize;
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1.min(n - 1));
        let mut cycle: Vec<usize> = (0..n).collect();
        cycle.rotate_left(1);
        same_tensor(&format!("({g},{n}) under a transposition"), &t.permuted(&swap), &t)?;
        same_tensor(&format!("({g},{n}) under a cycle"), &t.permuted(&cycle), &t)?;
    }
    Ok(format!("{} correlators", STABLE.len()))
}

fn pole_bounds(e: &Engine) -> Outcome {
    for (g, n) in STABLE {
        let t = e.correlator(g, n).map_err(err)?;
        let (lo, hi) = (t.min_pole_order(), t.max_pole_order());
        if t.is_zero() || lo < 2 || hi > 6 * g + 2 * n - 4 {
            return Err(format!("({g},{n}) has pole orders {lo}..{hi}, allowed 2..{}", 6 * g + 2 * n - 4));
        }
    }
    Ok(String::new())
}

fn rescaling(curve: &SpectralCurve, e: &Engine, order: Option<i64>, l: &Rational) -> Outcome {
    let el = engine(&curve.with_y(curve.y.scale(l)), order)?;
    for (g, n) in STABLE {
        let factor = pow(l, 2 - 2 * g as i64 - n as i64).map_err(err)?;
        let expect = e.correlator(g, n).map_err(err)?.scale(&factor);
        same_tensor(&format!("({g},{n})"), &*el.correlator(g, n).map_err(err)?, &expect)?;
    }
    let f2 = e.fg(2).map_err(err)?;
    equal("F_2", &el.fg(2).map_err(err)?, &(&f2 * pow(l, -2).map_err(err)?))?;
    Ok(format!("F_2 = {f2}"))
}

fn shift(curve: &SpectralCurve, e: &Engine, order: Option<i64>, by: &RationalFunction) -> Outcome {
    let es = engine(&curve.with_y(&curve.y + by), order)?;
    for (g, n) in STABLE {
        same_tensor(&format!("({g},{n})"), &*es.correlator(g, n).map_err(err)?, &*e.correlator(g, n).map_err(err)?)?;
    }
    equal("F_2", &es.fg(2).map_err(err)?, &e.fg(2).map_err(err)?)?;
    Ok(String::new())
}

fn dilaton(e: &Engine, g: u32, n: u32) -> Outcome {
    let cert = e.dilaton_check(g, n).map_err(err)?;
    same_tensor("lhs - rhs", &cert.lhs, &cert.rhs)?;
    Ok(String::new())
}

fn direct(curve: &SpectralCurve, e: &Engine) -> Outcome {
    let d = omega21_direct(curve).map_err(err)?;
    same_tensor("ω_2^(1)", &d, &*e.correlator(1, 2).map_err(err)?)?;
    Ok(format!("{} entries", d.entries.len()))
}

fn phi_constant(e: &Engine) -> Outcome {
    let f2 = e.fg(2).map_err(err)?;
    for c in [rat(1), ratio(-7, 3), rat(1000)] {
        equal(&format!("F_2 with Φ + {c}"), &e.fg_with_phi_constant(2, &c).map_err(err)?, &f2)?;
    }
    Ok(String::new())
}

fn truncation(curve: &SpectralCurve, e: &Engine) -> Outcome {
    for (g, n) in STABLE {
        let plus = e.order_used(g, n).unwrap_or_else(|| e.base_order(g, n)) + 10;
        let deeper = engine(curve, Some(plus))?;
        same_tensor(&format!("({g},{n}) at order {plus}"), &*deeper.correlator(g, n).map_err(err)?, &*e.correlator(g, n).map_err(err)?)?;
    }
    Ok(String::new())
}

fn serial(curve: &SpectralCurve, e: &Engine, order: Option<i64>) -> Outcome {
    let s = engine(curve, order)?.with_parallel(false);
    for (g, n) in STABLE {
        let a = s.correlator(g, n).map_err(err)?;
        let b = e.correlator(g, n).map_err(err)?;
        same_tensor(&format!("({g},{n})"), &a, &b)?;
        if serde_json::to_string(&a.to_records()).map_err(err)? != serde_json::to_string(&b.to_records()).map_err(err)? {
            return Err(format!("({g},{n}) serializations differ"));
        }
    }
    Ok(String::new())
}

fn memo_purity(curve: &SpectralCurve, order: Option<i64>) -> Outcome {
    let cold = engine(curve, order)?.correlator(2, 1).map_err(err)?;
    let warm = engine(curve, order)?;
    warm.correlator(1, 2).map_err(err)?;
    same_tensor("(2,1) after (1,2)", &*warm.correlator(2, 1).map_err(err)?, &cold)?;
    Ok(String::new())
}

/// The identity suite, valid on every curve.
pub fn identity_checks(curve: &SpectralCurve, order: Option<i64>) -> Vec<Check> {
    let e = match engine(curve, order) {
        Ok(e) => e,
        Err(d) => return vec![Check::new("engine", Err(d))],
    };
    let mut out = vec![
        Check::new("slot symmetry", symmetry(&e)),
        Check::new("pole bounds [2, 6g-4+2n]", pole_bounds(&e)),
    ];
    for l in [rat(2), rat(3)] {
        out.push(Check::new(format!("rescaling y -> {l}y"), rescaling(curve, &e, order, &l)));
    }
    let c = ratio(1, 3);
    out.push(Check::new(format!("shift y -> y + {c}"), shift(curve, &e, order, &RationalFunction::constant(c))));
    if let Some(x) = &curve.x {
        out.push(Check::new("shift y -> y + x", shift(curve, &e, order, x)));
    }
    for (g, n) in [(0, 3), (1, 1), (2, 1)] {
        out.push(Check::new(format!("dilaton ({g},{n}) <-> ({g},{})", n + 1), dilaton(&e, g, n)));
    }
    out.push(Check::new("ω_2^(1) direct = recursive", direct(curve, &e)));
    out.push(Check::new("F_2 independent of Φ constant", phi_constant(&e)));
    out.push(Check::new("truncation at order + 10", truncation(curve, &e)));
    out.push(Check::new("parallel = serial", serial(curve, &e, order)));
    out.push(Check::new("memo purity", memo_purity(curve, order)));
    out
}

fn airy_correlators(e: &Engine) -> Outcome {
    let w03 = e.correlator(0, 3).map_err(err)?;
    let mut expect = CorrelatorTensor::new(0, 3, w03.branch_points.clone());
    expect.add(vec![BasisForm::new(0, 2); 3], ratio(1, 2));
    same_tensor("ω_3^(0)", &w03, &expect)?;
    let w11 = e.correlator(1, 1).map_err(err)?;
    let mut expect = CorrelatorTensor::new(1, 1, w11.branch_points.clone());
    expect.add(vec![BasisForm::new(0, 4)], ratio(1, 16));
    same_tensor("ω_1^(1)", &w11, &expect)?;
    Ok("ω_3^(0) = 1/2 Π dζ/ζ², ω_1^(1) = dζ/(16ζ⁴)".into())
}

/// Windows with 2g - 2 + n ≤ 3.
const TAU_WINDOWS: [(u32, u32); 7] = [(0, 3), (1, 1), (0, 4), (1, 2), (0, 5), (1, 3), (2, 1)];

fn airy_intersections(e: &Engine) -> Outcome {
    let get = |g, n, k: &[i64]| -> Result<Rational, String> {
        intersection_numbers(e, g, n)
            .map_err(err)?
            .get(k)
            .cloned()
            .ok_or_else(|| format!("no entry {k:?} at ({g},{n})"))
    };
    equal("⟨τ_0³⟩", &get(0, 3, &[0, 0, 0])?, &rat(1))?;
    equal("⟨τ_0³τ_1⟩", &get(0, 4, &[0, 0, 0, 1])?, &rat(1))?;
    equal("⟨τ_1⟩", &get(1, 1, &[1])?, &ratio(1, 24))?;
    equal("⟨τ_0τ_2⟩", &get(1, 2, &[0, 2])?, &ratio(1, 24))?;
    equal("⟨τ_1²⟩", &get(1, 2, &[1, 1])?, &ratio(1, 24))?;
    Ok(String::new())
}

/// String and dilaton equations among the extracted values, and agreement
/// with the closure of the two seeds.
fn airy_closure(e: &Engine) -> Outcome {
    let mut values: BTreeMap<(u32, Vec<u32>), Rational> = BTreeMap::new();
    for (g, n) in TAU_WINDOWS {
        for (idx, v) in &intersection_numbers(e, g, n).map_err(err)?.values {
            let mut k: Vec<u32> = idx.k.iter().map(|&k| k as u32).collect();
            k.sort_unstable();
            values.insert((g, k), v.clone());
        }
    }
    let look = |g: u32, ds: &[u32]| -> Rational {
        let mut k = ds.to_vec();
        k.sort_unstable();
        values.get(&(g, k)).cloned().unwrap_or_else(Rational::zero)
    };
    let mut relations = 0;
    for ((g, ds), v) in &values {
        let g = *g;
        if ds[0] == 0 && (g, ds.len()) != (0, 3) {
            let rest = &ds[1..];
            let mut sum = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut r = rest.to_vec();
                    r[j] -= 1;
                    sum += look(g, &r);
                }
            }
            equal(&format!("string at genus {g}, {ds:?}"), v, &sum)?;
            relations += 1;
        }
        if let Some(p) = ds.iter().position(|&d| d == 1) {
            if (g, ds.len()) != (1, 1) {
                let mut rest = ds.clone();
                rest.remove(p);
                let want = rat(2 * g as i64 - 2 + rest.len() as i64) * look(g, &rest);
                equal(&format!("dilaton at genus {g}, {ds:?}"), v, &want)?;
                relations += 1;
            }
        }
    }
    let mut table = TauTable::new(look(0, &[0, 0, 0]), look(1, &[1]));
    let mut reachable = 0;
    for ((g, ds), v) in &values {
        match table.get(*g, ds) {
            Ok(t) => {
                equal(&format!("closure at genus {g}, {ds:?}"), v, &t)?;
                reachable += 1;
            }
            Err(toprec_core::oracles::OracleError::Unreachable { .. }) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(format!("{} values, {relations} relations, {reachable} matched against the closure", values.len()))
}

fn gaussian_tutte(curve: &SpectralCurve) -> Outcome {
    let w = curve.expansion_point("infinity").ok_or("no expansion point named infinity")?.weight.clone();
    let r = expand_at_point(&Target::Disc(curve), &[w], (0, 12)).map_err(err)?;
    let t = tutte_disc(&BTreeMap::from([(2, rat(-1))]), &rat(1), 12).map_err(err)?;
    for k in 0..=12i64 {
        equal(&format!("Ã_{k}"), r.get(&[k]).ok_or("missing coefficient")?, &t[k as usize])?;
    }
    let shown: Vec<String> = t[..9].iter().map(|v| v.to_string()).collect();
    Ok(shown.join(","))
}

fn gaussian_gluings(curve: &SpectralCurve, e: &Engine) -> Outcome {
    let w = curve.expansion_point("infinity").ok_or("no expansion point named infinity")?.weight.clone();
    let mut reports = vec![expand_at_point(&Target::Disc(curve), std::slice::from_ref(&w), (0, 12)).map_err(err)?];
    for g in 1..=2 {
        let t = e.correlator(g, 1).map_err(err)?;
        reports.push(expand_at_point(&Target::Generating(&t), std::slice::from_ref(&w), (0, 12)).map_err(err)?);
    }
    for k in 1..=6u32 {
        let counts = one_face_maps(k).map_err(err)?;
        for (g, r) in reports.iter().enumerate() {
            let want = rat(*counts.get(&(g as u32)).unwrap_or(&0) as i64);
            equal(&format!("ε_{g}({k})"), r.get(&[2 * k as i64]).ok_or("missing coefficient")?, &want)?;
        }
    }
    Ok(format!(
        "ε_1(2) = {}, ε_1(3) = {}",
        reports[1].get(&[4]).expect("in window"),
        reports[1].get(&[6]).expect("in window")
    ))
}

fn lambert_disc(curve: &SpectralCurve) -> Outcome {
    let w = curve.expansion_point("log").ok_or("no expansion point named log")?.weight.clone();
    let r = expand_at_point(&Target::Disc(curve), &[w], (1, 8)).map_err(err)?;
    let rec = genus0_one_part(8);
    for n in 1..=8i64 {
        let closed = pow(&rat(n), n - 1).map_err(err)? / factorial(n as u64);
        let mu = Partition::new(vec![n as u32]).map_err(err)?;
        let got = r.get(&[n]).ok_or("missing coefficient")?;
        equal(&format!("H_0,{n} closed form"), got, &closed)?;
        equal(&format!("H_0,{n} cut-and-join"), got, &normalized_hurwitz(0, &mu).map_err(err)?)?;
        equal(&format!("H_0,{n} genus-0 recursion"), got, &rec[n as usize - 1])?;
    }
    Ok("n^(n-1)/n! for n ≤ 8".into())
}

fn lambert_stable(curve: &SpectralCurve, e: &Engine) -> Outcome {
    let w = curve.expansion_point("log").ok_or("no expansion point named log")?.weight.clone();
    let mut compared = 0;
    for (g, n, top) in [(0u32, 3u32, 3i64), (1, 1, 4), (0, 4, 2), (1, 2, 2), (2, 1, 3)] {
        let t = e.correlator(g, n).map_err(err)?;
        let r = expand_at_point(&Target::Generating(&t), std::slice::from_ref(&w), (1, top)).map_err(err)?;
        for (idx, v) in &r.values {
            let mu = Partition::new(idx.k.iter().map(|&k| k as u32).collect()).map_err(err)?;
            equal(&format!("H_{g},{mu}"), v, &normalized_hurwitz(g, &mu).map_err(err)?)?;
            compared += 1;
        }
    }
    Ok(format!("{compared} coefficients"))
}

/// Oracle comparisons for a shipped curve.
pub fn oracle_checks(name: &str, curve: &SpectralCurve, order: Option<i64>) -> Vec<Check> {
    let e = match engine(curve, order) {
        Ok(e) => e,
        Err(d) => return vec![Check::new("engine", Err(d))],
    };
    match name {
        "airy" => vec![
            Check::new("airy correlators", airy_correlators(&e)),
            Check::new("intersection numbers", airy_intersections(&e)),
            Check::new("string/dilaton closure", airy_closure(&e)),
        ],
        "gaussian" => vec![
            Check::new("disc = Tutte recursion", gaussian_tutte(curve)),
            Check::new("one-face gluings by genus", gaussian_gluings(curve, &e)),
        ],
        "lambert" => vec![
            Check::new("disc = Hurwitz H_0,n", lambert_disc(curve)),
            Check::new("stable correlators = cut-and-join", lambert_stable(curve, &e)),
        ],
        _ => Vec::new(),
    }
}

/// A shipped suite: identities followed by its oracle comparisons.
pub fn suite(name: &str, order: Option<i64>) -> Option<Vec<Check>> {
    let curve = builtin_curve(name)?;
    let mut checks = identity_checks(&curve, order);
    checks.extend(oracle_checks(name, &curve, order));
    Some(checks)
}

/// One summary line per acceptance criterion, except the cache half of the
/// determinism criterion, which needs a scratch directory.
pub fn acceptance_criteria() -> Vec<(u32, String, Vec<Check>)> {
    let curves: Vec<(&str, SpectralCurve)> = BUILTIN_CURVES.iter().map(|&n| (n, builtin_curve(n).expect("shipped"))).collect();
    let find = |name: &str, check: &str| -> Check {
        let c = &curves.iter().find(|c| c.0 == name).expect("shipped").1;
        oracle_checks(name, c, None)
            .into_iter()
            .find(|x| x.name == check)
            .expect("known check")
    };
    let mut identities = Vec::new();
    let mut determinism = Vec::new();
    for (name, c) in &curves {
        for mut check in identity_checks(c, None) {
            check.name = format!("{name}: {}", check.name);
            if check.name.ends_with("parallel = serial") {
                determinism.push(check);
            } else {
                identities.push(check);
            }
        }
    }
    vec![
        (1, "Airy ω_3^(0) and ω_1^(1)".into(), vec![find("airy", "airy correlators")]),
        (
            2,
            "intersection numbers and string/dilaton".into(),
            vec![find("airy", "intersection numbers"), find("airy", "string/dilaton closure")],
        ),
        (
            3,
            "Lambert disc = Hurwitz numbers".into(),
            vec![find("lambert", "disc = Hurwitz H_0,n"), find("lambert", "stable correlators = cut-and-join")],
        ),
        (
            4,
            "Gaussian disc = Tutte, ω_1^(1) = one-face gluings".into(),
            vec![find("gaussian", "disc = Tutte recursion"), find("gaussian", "one-face gluings by genus")],
        ),
        (5, "identity suites on the shipped curves".into(), identities),
        (6, "determinism: parallel = serial, cold cache = warm cache".into(), determinism),
    ]
}
