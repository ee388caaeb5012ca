use proptest::prelude::*;
use toprec_core::algebra::{pow, rat, ratio, Rational, RationalFunction};
use toprec_core::curve::{builtin_curve, SpectralCurve, BUILTIN_CURVES};
use toprec_core::recursion::{CorrelatorTensor, Engine};

/// Stable (g, n) with 2g - 2 + n ≤ 4.
const STABLE: [(u32, u32); 10] = [(0, 3), (1, 1), (0, 4), (1, 2), (0, 5), (1, 3), (2, 1), (0, 6), (1, 4), (2, 2)];

fn curve(name: &str) -> SpectralCurve {
    builtin_curve(name).unwrap()
}

fn scaled(c: &SpectralCurve, l: &Rational) -> SpectralCurve {
    c.with_y(c.y.scale(l))
}

fn shifted(c: &SpectralCurve, by: &RationalFunction) -> SpectralCurve {
    c.with_y(&c.y + by)
}

fn full_symmetry(t: &CorrelatorTensor) -> bool {
    let n = t.n as usize;
    if n < 2 {
        return true;
    }
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    let mut cycle: Vec<usize> = (0..n).collect();
    cycle.rotate_left(1);
    t.permuted(&swap) == *t && t.permuted(&cycle) == *t
}

#[test]
fn symmetry_and_pole_bounds() {
    for name in BUILTIN_CURVES {
        let e = Engine::new(curve(name)).unwrap();
        for (g, n) in STABLE {
            let t = e.correlator(g, n).unwrap();
            assert!(!t.is_zero(), "{name} ({g},{n})");
            assert!(full_symmetry(&t), "{name} ({g},{n}) not symmetric");
            assert!(t.min_pole_order() >= 2, "{name} ({g},{n})");
            assert!(t.max_pole_order() <= 6 * g + 2 * n - 4, "{name} ({g},{n})");
        }
    }
}

#[test]
fn rescaling_law() {
    for name in BUILTIN_CURVES {
        let c = curve(name);
        let e = Engine::new(c.clone()).unwrap();
        for l in [rat(2), rat(3)] {
            let el = Engine::new(scaled(&c, &l)).unwrap();
            for (g, n) in STABLE {
                let factor = pow(&l, 2 - 2 * g as i64 - n as i64).unwrap();
                let expect = e.correlator(g, n).unwrap().scale(&factor);
                assert_eq!(el.correlator(g, n).unwrap().first_difference(&expect), None, "{name} λ = {l} ({g},{n})");
            }
            assert_eq!(el.fg(2).unwrap(), e.fg(2).unwrap() * pow(&l, -2).unwrap(), "{name} λ = {l}");
        }
    }
}

#[test]
fn shift_invariance() {
    for name in BUILTIN_CURVES {
        let c = curve(name);
        let e = Engine::new(c.clone()).unwrap();
        let mut shifts = vec![RationalFunction::constant(ratio(7, 3))];
        if let Some(x) = &c.x {
            shifts.push(x.clone());
        }
        for by in &shifts {
            let es = Engine::new(shifted(&c, by)).unwrap();
            for (g, n) in STABLE {
                assert_eq!(
                    es.correlator(g, n).unwrap().first_difference(&e.correlator(g, n).unwrap()),
                    None,
                    "{name} y + {by} ({g},{n})"
                );
            }
            assert_eq!(es.fg(2).unwrap(), e.fg(2).unwrap(), "{name} y + {by}");
        }
    }
}

#[test]
fn dilaton_identity() {
    for name in BUILTIN_CURVES {
        let e = Engine::new(curve(name)).unwrap();
        for (g, n) in [(0, 3), (1, 1), (2, 1)] {
            let cert = e.dilaton_check(g, n).unwrap();
            assert!(cert.holds(), "{name} ({g},{n}): {:?}", cert.difference.entries.iter().next());
            assert!(!cert.lhs.is_zero());
        }
    }
}

#[test]
fn phi_constant_and_known_invariants() {
    let gaussian = Engine::new(curve("gaussian")).unwrap();
    assert_eq!(gaussian.fg(2).unwrap(), ratio(1, 240));
    for name in BUILTIN_CURVES {
        let e = Engine::new(curve(name)).unwrap();
        let f2 = e.fg(2).unwrap();
        for c in [rat(1), ratio(-5, 2), rat(100)] {
            assert_eq!(e.fg_with_phi_constant(2, &c).unwrap(), f2, "{name} c = {c}");
        }
    }
}

#[test]
fn truncation_memo_and_parallelism_do_not_change_results() {
    for name in BUILTIN_CURVES {
        let c = curve(name);
        let base = Engine::new(c.clone()).unwrap();
        let serial = Engine::new(c.clone()).unwrap().with_parallel(false);
        for (g, n) in STABLE {
            let t = base.correlator(g, n).unwrap();
            let deeper = Engine::new(c.clone()).unwrap().with_order(Some(base.base_order(g, n) + 10));
            assert_eq!(*deeper.correlator(g, n).unwrap(), *t, "{name} ({g},{n}) truncation");
            assert_eq!(*serial.correlator(g, n).unwrap(), *t, "{name} ({g},{n}) serial");
        }
        let cold = Engine::new(c.clone()).unwrap().correlator(2, 1).unwrap();
        let warm = Engine::new(c.clone()).unwrap();
        warm.correlator(1, 2).unwrap();
        assert_eq!(*warm.correlator(2, 1).unwrap(), *cold, "{name} memo");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rescaling_by_arbitrary_rationals(p in 1i64..=7, q in 1i64..=5, neg in any::<bool>(), which in 0usize..3) {
        let l = ratio(if neg { -p } else { p }, q);
        let c = curve(BUILTIN_CURVES[which]);
        let e = Engine::new(c.clone()).unwrap();
        let el = Engine::new(scaled(&c, &l)).unwrap();
        for (g, n) in [(0u32, 3u32), (1, 1), (0, 4), (1, 2)] {
            let factor = pow(&l, 2 - 2 * g as i64 - n as i64).unwrap();
            prop_assert_eq!(el.correlator(g, n).unwrap().first_difference(&e.correlator(g, n).unwrap().scale(&factor)), None);
        }
    }

    #[test]
    fn shifting_by_arbitrary_constants(p in -9i64..=9, q in 1i64..=4, which in 0usize..3) {
        let c = curve(BUILTIN_CURVES[which]);
        let e = Engine::new(c.clone()).unwrap();
        let es = Engine::new(shifted(&c, &RationalFunction::constant(ratio(p, q)))).unwrap();
        for (g, n) in [(0u32, 3u32), (1, 1), (0, 4), (1, 2)] {
            prop_assert_eq!(es.correlator(g, n).unwrap().first_difference(&e.correlator(g, n).unwrap()), None);
        }
    }

    #[test]
    fn phi_constant_is_irrelevant(p in -50i64..=50, q in 1i64..=9, which in 0usize..3) {
        let e = Engine::new(curve(BUILTIN_CURVES[which])).unwrap();
        prop_assert_eq!(e.fg_with_phi_constant(2, &ratio(p, q)).unwrap(), e.fg(2).unwrap());
    }

    #[test]
    fn symmetric_under_random_permutations(seed in prop::collection::vec(0usize..4, 4), which in 0usize..3) {
        let e = Engine::new(curve(BUILTIN_CURVES[which])).unwrap();
        let t = e.correlator(0, 4).unwrap();
        let mut perm: Vec<usize> = (0..4).collect();
        for (i, s) in seed.iter().enumerate() {
            perm.swap(i, *s);
        }
        prop_assert_eq!(t.permuted(&perm), (*t).clone());
    }
}
