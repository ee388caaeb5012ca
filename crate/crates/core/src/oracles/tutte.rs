use std::collections::BTreeMap;

use num_traits::Zero;

use super::OracleError;
use crate::algebra::Rational;

fn checked_t2(times: &BTreeMap<usize, Rational>) -> Result<Rational, OracleError> {
    match times.get(&2) {
        Some(t) if !t.is_zero() => Ok(t.clone()),
        _ => Err(OracleError::ZeroQuadraticTime),
    }
}

/// Disc coefficients `Ã_0..=Ã_{k_max}` from the edge-removal recursion.
///
/// Only `t_1` and `t_2` may be nonzero; `a0` is `Ã_0`.
pub fn tutte_disc(times: &BTreeMap<usize, Rational>, a0: &Rational, k_max: usize) -> Result<Vec<Rational>, OracleError> {
    let t2 = checked_t2(times)?;
    if let Some((&l, _)) = times.iter().find(|(&l, t)| l >= 3 && !t.is_zero()) {
        return Err(OracleError::NotForward(l));
    }
    let t1 = times.get(&1).cloned().unwrap_or_else(Rational::zero);
    let mut a = vec![a0.clone()];
    for k in 0..k_max {
        let mut rhs = Rational::zero();
        for l in 0..k {
            rhs += &a[l] * &a[k - l - 1];
        }
        rhs += &t1 * &a[k];
        a.push(-rhs / &t2);
    }
    Ok(a)
}

/// Disc coefficients with every `t_l`, `l ≥ 3`, scaled by `ε`.
///
/// Entry `[p][k]` is the coefficient of `ε^p` in `Ã_k`, for `p ≤ eps_order`,
/// with `Ã_0 = a0` exactly.
pub fn tutte_disc_perturbative(
    times: &BTreeMap<usize, Rational>,
    a0: &Rational,
    k_max: usize,
    eps_order: usize,
) -> Result<Vec<Vec<Rational>>, OracleError> {
    let t2 = checked_t2(times)?;
    let t1 = times.get(&1).cloned().unwrap_or_else(Rational::zero);
    let higher: Vec<(usize, Rational)> = times
        .iter()
        .filter(|(&l, t)| l >= 3 && !t.is_zero())
        .map(|(&l, t)| (l, t.clone()))
        .collect();
    let reach = higher.iter().map(|(l, _)| l - 2).max().unwrap_or(0);
    let mut table: Vec<Vec<Rational>> = Vec::new();
    for p in 0..=eps_order {
        // order p needs order p - 1 further out
        let len = k_max + (eps_order - p) * reach + 1;
        let mut a = vec![Rational::zero(); len];
        if p == 0 {
            a[0] = a0.clone();
        }
        for k in 0..len - 1 {
            let mut rhs = Rational::zero();
            for q in 0..=p {
                let left = if q == p { &a } else { &table[q] };
                let right = if q == 0 { &a } else { &table[p - q] };
                for l in 0..k {
                    rhs += &left[l] * &right[k - l - 1];
                }
            }
            rhs += &t1 * &a[k];
            if p > 0 {
                for (l, t) in &higher {
                    rhs += t * &table[p - 1][k + l - 1];
                }
            }
            a[k + 1] = -rhs / &t2;
        }
        table.push(a);
    }
    for row in &mut table {
        row.truncate(k_max + 1);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, TruncatedSeries};

    fn gaussian() -> BTreeMap<usize, Rational> {
        BTreeMap::from([(2, rat(-1))])
    }

    #[test]
    fn gaussian_catalan() {
        let a = tutte_disc(&gaussian(), &rat(1), 8).unwrap();
        let expect: Vec<Rational> = [1, 0, 1, 0, 2, 0, 5, 0, 14].iter().map(|&c| rat(c)).collect();
        assert_eq!(a, expect);
    }

    #[test]
    fn rejects_bad_times() {
        assert_eq!(tutte_disc(&BTreeMap::new(), &rat(1), 3), Err(OracleError::ZeroQuadraticTime));
        let quartic = BTreeMap::from([(2, rat(-1)), (4, rat(1))]);
        assert_eq!(tutte_disc(&quartic, &rat(1), 3), Err(OracleError::NotForward(4)));
    }

    #[test]
    fn zeroth_order_is_unperturbed() {
        let quartic = BTreeMap::from([(2, rat(-1)), (4, rat(1))]);
        let p = tutte_disc_perturbative(&quartic, &rat(1), 10, 2).unwrap();
        assert_eq!(p[0], tutte_disc(&gaussian(), &rat(1), 10).unwrap());
    }

    #[test]
    fn quartic_first_order_matches_the_quadratic_equation() {
        // V' = -x + ε x³, P = -1 + ε (x² + Ã_2) with Ã_2 = 1 at order 0.
        // y = (-V' - sqrt(V'² + 4P))/2; the order-ε part in u = 1/x reads
        // y_1 = (-u^-3 + (u^-3 - 2u^-1 - 2u)(1 - 4u²)^(-1/2)) / 2.
        let n = 16;
        let inv_sqrt = TruncatedSeries::from_ints(0, &[1, 0, -4], n).sqrt().unwrap().inv().unwrap();
        let poly = TruncatedSeries::from_ints(-3, &[1, 0, -2, 0, -2], n);
        let y1 = (&(&poly * &inv_sqrt) - &TruncatedSeries::monomial(rat(1), -3, n)).scale(&crate::algebra::ratio(1, 2));
        let quartic = BTreeMap::from([(2, rat(-1)), (4, rat(1))]);
        let p = tutte_disc_perturbative(&quartic, &rat(1), 10, 1).unwrap();
        for k in 0..=10 {
            assert_eq!(p[1][k], y1.coeff(k as i64 + 1).unwrap(), "k = {k}");
        }
        assert_eq!(p[1][2], rat(2));
    }
}
