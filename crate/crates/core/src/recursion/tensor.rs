use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_rational, Rational};

/// The form `dζ / (ζ - a_point)^order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisForm {
    pub point: usize,
    pub order: u32,
}

impl BasisForm {
    pub fn new(point: usize, order: u32) -> Self {
        Self { point, order }
    }
}

/// `ω_n^(g)` as exact coefficients over products of basis forms, one per slot.
///
/// Every slot ordering is stored, so the map is the full tensor rather than
/// a symmetrised quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorTensor {
    pub g: u32,
    pub n: u32,
    pub branch_points: Vec<Rational>,
    pub entries: BTreeMap<Vec<BasisForm>, Rational>,
}

impl CorrelatorTensor {
    pub fn new(g: u32, n: u32, branch_points: Vec<Rational>) -> Self {
        Self {
            g,
            n,
            branch_points,
            entries: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, key: &[BasisForm]) -> Rational {
        self.entries.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c` to the entry at `key`, dropping it if the sum vanishes.
    pub fn add(&mut self, key: Vec<BasisForm>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::new(self.g, self.n, self.branch_points.clone());
        for (k, v) in &self.entries {
            out.add(k.clone(), v * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.add(k.clone(), -v);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Tensor with slots reordered: slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::new(self.g, self.n, self.branch_points.clone());
        for (k, v) in &self.entries {
            out.entries.insert(perm.iter().map(|&p| k[p]).collect(), v.clone());
        }
        out
    }

    /// The first entry where `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &Self) -> Option<(Vec<BasisForm>, Rational, Rational)> {
        let keys: std::collections::BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter().find_map(|k| {
            let (a, b) = (self.coeff(k), other.coeff(k));
            (a != b).then(|| (k.clone(), a, b))
        })
    }

    pub fn max_pole_order(&self) -> u32 {
        self.entries.keys().flatten().map(|f| f.order).max().unwrap_or(0)
    }

    pub fn min_pole_order(&self) -> u32 {
        self.entries.keys().flatten().map(|f| f.order).min().unwrap_or(0)
    }

    pub fn to_records(&self) -> Vec<TensorRecord> {
        self.entries
            .iter()
            .map(|(k, v)| TensorRecord {
                poles: k
                    .iter()
                    .map(|f| (self.branch_points[f.point].to_string(), f.order))
                    .collect(),
                coeff: v.to_string(),
            })
            .collect()
    }

    pub fn from_records(
        g: u32,
        n: u32,
        branch_points: Vec<Rational>,
        records: &[TensorRecord],
    ) -> Result<Self, String> {
        let mut out = Self::new(g, n, branch_points);
        for r in records {
            let key = r
                .poles
                .iter()
                .map(|(a, m)| {
                    let a = parse_rational(a).map_err(|e| e.to_string())?;
                    let point = out
                        .branch_points
                        .iter()
                        .position(|b| b == &a)
                        .ok_or_else(|| format!("unknown branch point {a}"))?;
                    Ok(BasisForm::new(point, *m))
                })
                .collect::<Result<Vec<_>, String>>()?;
            let c = parse_rational(&r.coeff).map_err(|e| e.to_string())?;
            out.entries.insert(key, c);
        }
        Ok(out)
    }
}

/// One serialized entry: the pole `(a, m)` of each slot and the exact coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub poles: Vec<(String, u32)>,
    pub coeff: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    #[test]
    fn add_cancels_and_records_round_trip() {
        let mut t = CorrelatorTensor::new(0, 2, vec![rat(-1), rat(1)]);
        t.add(vec![BasisForm::new(0, 2), BasisForm::new(1, 3)], ratio(1, 2));
        t.add(vec![BasisForm::new(1, 3), BasisForm::new(0, 2)], ratio(1, 2));
        let recs = t.to_records();
        assert_eq!(recs[0].poles, vec![("-1".to_string(), 2), ("1".to_string(), 3)]);
        let back = CorrelatorTensor::from_records(0, 2, t.branch_points.clone(), &recs).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.permuted(&[1, 0]), t);
        t.add(vec![BasisForm::new(0, 2), BasisForm::new(1, 3)], ratio(-1, 2));
        assert_eq!(t.entries.len(), 1);
    }
}
