use std::collections::BTreeMap;

use num_traits::Zero;
use toprec_core::algebra::{binomial, rat, ratio, Polynomial, Rational, RationalFunction};
use toprec_core::curve::{builtin_curve, find_branchpoints, ChartPoint, SpectralCurve};
use toprec_core::recursion::{BasisForm, Engine};
use toprec_core::transforms::{
    basis_decomposition, expand_at_point, extract_times, intersection_numbers, Target, TransformError, WeightFunction,
};

fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
    RationalFunction::new(Polynomial::from_ints(num), Polynomial::from_ints(den)).unwrap()
}

/// y = ζ + ζ², x = ζ²/(1 - ζ)²: one branch point with z = s/(1 - s) rational.
fn rational_root_curve() -> SpectralCurve {
    SpectralCurve::new("root", rf(&[0, 1, 1], &[1]), rf(&[0, 2], &[1, -3, 3, -1]), Some(rf(&[0, 0, 1], &[1, -2, 1]))).unwrap()
}

#[test]
fn lagrange_consistency_under_a_shifted_weight() {
    // f' = f + 1 at infinity: Ã'_m = Σ_k C(m, k) Ã_k
    let g = builtin_curve("gaussian").unwrap();
    let w = g.expansion_point("infinity").unwrap().weight.clone();
    let mut w1 = w.clone();
    w1.rational = &w.rational + &RationalFunction::constant(rat(1));
    let e = Engine::new(g.clone()).unwrap();
    let w11 = e.correlator(1, 1).unwrap();
    for target in [Target::Disc(&g), Target::Generating(&w11)] {
        let a = expand_at_point(&target, &[w.clone()], (-3, 10)).unwrap();
        let b = expand_at_point(&target, &[w1.clone()], (-3, 10)).unwrap();
        for m in -3..=10i64 {
            let expect: Rational = (0..=m.max(-1)).map(|k| binomial(m, k) * a.get(&[k]).unwrap()).sum();
            let expect = if m < 0 { a.get(&[m]).unwrap().clone() } else { expect };
            assert_eq!(b.get(&[m]).unwrap(), &expect, "m = {m}");
        }
        assert!((-3..0).all(|k| a.get(&[k]).unwrap().is_zero()));
    }
}

#[test]
fn bergman_double_expansion() {
    let (p1, p2) = (ratio(1, 2), rat(3));
    let w = [
        WeightFunction::local_coordinate(ChartPoint::Finite(p1.clone())),
        WeightFunction::local_coordinate(ChartPoint::Finite(p2.clone())),
    ];
    let r = expand_at_point(&Target::Bergman, &w, (-5, 1)).unwrap();
    for a in 0..=3i64 {
        // [t1^a] (ζ1 - ζ2)^-2 = (-1)^a (a + 1) (p1 - ζ2)^(-a-2), then expand at ζ2 = p2
        let base = Polynomial::new(vec![p1.clone(), rat(-1)]).pow(a as u32 + 2);
        let sign = if a % 2 == 0 { rat(1) } else { rat(-1) };
        let f = RationalFunction::new(Polynomial::constant(sign * rat(a + 1)), base).unwrap();
        let s = f.expand_at(&p2, 6).unwrap();
        for b in 0..=3i64 {
            assert_eq!(r.get(&[-a - 1, -b - 1]).unwrap(), &s.coeff(b).unwrap(), "a = {a}, b = {b}");
        }
    }
    for k in 0..=1 {
        assert!(r.get(&[k, -1]).unwrap().is_zero());
    }
    let same = [w[0].clone(), w[0].clone()];
    assert!(matches!(expand_at_point(&Target::Bergman, &same, (0, 1)), Err(TransformError::Precondition(_))));
}

#[test]
fn basis_round_trip() {
    let c = rational_root_curve();
    assert_eq!(find_branchpoints(&c).unwrap(), vec![rat(0)]);
    let e = Engine::new(c).unwrap();
    // z^(-2k-1) = (1 - s)^(2k+1) s^(-2k-1): β_{k,m} = (m - 1)(-1)^m C(2k+1, 2k+2-m)
    let beta = |k: i64, m: i64| rat(m - 1) * if m % 2 == 0 { rat(1) } else { rat(-1) } * binomial(2 * k + 1, 2 * k + 2 - m);
    for (g, n) in [(0u32, 3u32), (1, 1), (0, 4), (1, 2), (2, 1)] {
        let t = e.correlator(g, n).unwrap();
        let a = basis_decomposition(&e, &t).unwrap();
        let mut rebuilt: BTreeMap<Vec<BasisForm>, Rational> = BTreeMap::new();
        for (idx, v) in &a.values {
            let mut partial = vec![(Vec::new(), v.clone())];
            for &k in &idx.k {
                let mut next = Vec::new();
                for (key, c) in &partial {
                    for m in 2..=2 * k + 2 {
                        let b = beta(k, m);
                        if b.is_zero() {
                            continue;
                        }
                        let mut key: Vec<BasisForm> = key.clone();
                        key.push(BasisForm::new(0, m as u32));
                        next.push((key, c * &b));
                    }
                }
                partial = next;
            }
            for (key, c) in partial {
                *rebuilt.entry(key).or_insert_with(Rational::zero) += c;
            }
        }
        rebuilt.retain(|_, v| !v.is_zero());
        assert_eq!(rebuilt, t.entries, "({g},{n})");
    }
}

#[test]
fn times_of_the_reference_curves() {
    let airy = Engine::new(builtin_curve("airy").unwrap()).unwrap();
    let f = airy.frames(12).unwrap();
    let t = extract_times(&f[0].frame).unwrap();
    assert_eq!(t.notes["lambda"], "1");
    assert!(t.values.values().all(|v| v.is_zero()));

    let root = Engine::new(rational_root_curve()).unwrap();
    let f = root.frames(12).unwrap();
    let t = extract_times(&f[0].frame).unwrap();
    assert!(t.values.values().any(|v| !v.is_zero()));
    assert!(matches!(intersection_numbers(&root, 0, 3), Err(TransformError::Precondition(_))));

    let gaussian = Engine::new(builtin_curve("gaussian").unwrap()).unwrap();
    let w03 = gaussian.correlator(0, 3).unwrap();
    assert!(matches!(basis_decomposition(&gaussian, &w03), Err(TransformError::NotASquare { .. })));
}

#[test]
fn airy_intersection_windows() {
    let e = Engine::new(builtin_curve("airy").unwrap()).unwrap();
    let r = intersection_numbers(&e, 2, 1).unwrap();
    assert_eq!(r.get(&[4]), Some(&ratio(1, 1152)));
    let r = intersection_numbers(&e, 1, 1).unwrap();
    assert_eq!(r.get(&[1]), Some(&ratio(1, 24)));
}
