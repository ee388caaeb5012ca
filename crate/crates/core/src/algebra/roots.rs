//! Rational roots and partial fractions over rational poles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{denominator_lcm, AlgebraError, Polynomial, Rational, RationalFunction};

/// Rational roots of a polynomial together with the cofactor left after
/// dividing them out: `p = cofactor * prod (z - r)^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSplit {
    pub roots: Vec<(Rational, u32)>,
    pub cofactor: Polynomial,
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Finds every rational root with its multiplicity by the rational-root test
/// applied to the integer content-free form of `p`.
pub fn rational_roots(p: &Polynomial) -> RootSplit {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    if rest.is_zero() {
        return RootSplit {
            roots,
            cofactor: rest,
        };
    }
    let zero = Rational::zero();
    let mut m0 = 0;
    while rest.degree().unwrap_or(0) > 0 && rest.coeff(0).is_zero() {
        rest = rest.div_rem(&Polynomial::linear_root(&zero)).unwrap().0;
        m0 += 1;
    }
    if m0 > 0 {
        roots.push((zero, m0));
    }
    if rest.degree().unwrap_or(0) > 0 {
        let scale = Rational::from_integer(denominator_lcm(rest.coeffs()));
        let ints = rest.scale(&scale);
        let lead = ints.leading().to_integer();
        let constant = ints.coeff(0).to_integer();
        let mut candidates = Vec::new();
        for num in positive_divisors(&constant) {
            for den in positive_divisors(&lead) {
                let c = Rational::new(num.clone(), den);
                candidates.push(c.clone());
                candidates.push(-c);
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            let lin = Polynomial::linear_root(&c);
            let mut mult = 0;
            while rest.degree().unwrap_or(0) > 0 && rest.eval(&c).is_zero() {
                rest = rest.div_rem(&lin).unwrap().0;
                mult += 1;
            }
            if mult > 0 {
                roots.push((c, mult));
            }
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    RootSplit {
        roots,
        cofactor: rest,
    }
}

/// Partial-fraction decomposition over supplied rational poles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub polynomial: Polynomial,
    /// `(pole, multiplicity) -> coefficient` of `1/(z - pole)^multiplicity`.
    pub terms: BTreeMap<(Rational, u32), Rational>,
}

impl PartialFractions {
    pub fn reassemble(&self) -> RationalFunction {
        let mut acc = RationalFunction::from_poly(self.polynomial.clone());
        for ((pole, m), c) in &self.terms {
            let den = Polynomial::linear_root(pole).pow(*m);
            let term = RationalFunction::new(Polynomial::constant(c.clone()), den)
                .expect("nonzero denominator");
            acc = &acc + &term;
        }
        acc
    }
}

/// Decomposes `f` into its polynomial part and principal parts at `poles`.
///
/// Fails when the denominator does not split over the supplied poles; the
/// error carries the remaining factor.
pub fn partial_fractions(
    f: &RationalFunction,
    poles: &[Rational],
) -> Result<PartialFractions, AlgebraError> {
    let mut rest = f.denom().clone();
    let mut mults = Vec::new();
    for a in poles {
        let lin = Polynomial::linear_root(a);
        let mut m = 0u32;
        while !rest.is_constant() && rest.eval(a).is_zero() {
            rest = rest.div_rem(&lin)?.0;
            m += 1;
        }
        if m > 0 {
            mults.push((a.clone(), m));
        }
    }
    if !rest.is_constant() {
        return Err(AlgebraError::NonSplitting(rest));
    }
    let (polynomial, _) = f.numer().div_rem(f.denom())?;
    let mut terms = BTreeMap::new();
    for (a, m) in mults {
        let local = f.expand_at(&a, 0)?;
        for k in 1..=m {
            let c = local.coeff(-(k as i64))?;
            if !c.is_zero() {
                terms.insert((a.clone(), k), c);
            }
        }
    }
    Ok(PartialFractions { polynomial, terms })
}
