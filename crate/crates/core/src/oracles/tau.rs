use std::collections::BTreeMap;

use num_traits::Zero;

use super::OracleError;
use crate::algebra::{rat, Rational};

/// `⟨Π τ_{d_i}⟩_g` obtained from `⟨τ_0³⟩_0` and `⟨τ_1⟩_1` by the string and
/// dilaton equations alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauTable {
    seeds: [Rational; 2],
    entries: BTreeMap<(u32, Vec<u32>), Rational>,
}

fn dimension_matches(g: u32, ds: &[u32]) -> bool {
    ds.iter().sum::<u32>() as i64 == 3 * g as i64 - 3 + ds.len() as i64
}

impl TauTable {
    pub fn new(tau0_cubed: Rational, tau1: Rational) -> Self {
        Self {
            seeds: [tau0_cubed, tau1],
            entries: BTreeMap::new(),
        }
    }

    pub fn entries(&self) -> &BTreeMap<(u32, Vec<u32>), Rational> {
        &self.entries
    }

    /// Value for `ds` in any order; zero off the dimension constraint.
    pub fn get(&mut self, g: u32, ds: &[u32]) -> Result<Rational, OracleError> {
        let n = ds.len() as u32;
        if 2 * g + n <= 2 {
            return Err(OracleError::Unstable { g, n });
        }
        if !dimension_matches(g, ds) {
            return Ok(Rational::zero());
        }
        let mut key = ds.to_vec();
        key.sort_unstable();
        if let Some(v) = self.entries.get(&(g, key.clone())) {
            return Ok(v.clone());
        }
        let value = match (g, key.as_slice()) {
            (0, [0, 0, 0]) => self.seeds[0].clone(),
            (1, [1]) => self.seeds[1].clone(),
            (_, [0, rest @ ..]) => {
                // string
                let mut total = Rational::zero();
                for j in 0..rest.len() {
                    if rest[j] == 0 {
                        continue;
                    }
                    let mut lowered = rest.to_vec();
                    lowered[j] -= 1;
                    total += self.get(g, &lowered)?;
                }
                total
            }
            _ if key.contains(&1) => {
                // dilaton
                let pos = key.iter().position(|&d| d == 1).expect("present");
                let mut rest = key.clone();
                rest.remove(pos);
                let m = rest.len() as i64;
                rat(2 * g as i64 - 2 + m) * self.get(g, &rest)?
            }
            _ => return Err(OracleError::Unreachable { g, ds: key }),
        };
        self.entries.insert((g, key), value.clone());
        Ok(value)
    }

    /// Every reachable entry with `n ≤ n_max` at genus `g`.
    pub fn fill(&mut self, g: u32, n_max: u32) {
        for n in 1..=n_max {
            let d = 3 * g as i64 - 3 + n as i64;
            if d < 0 || 2 * g + n <= 2 {
                continue;
            }
            for ds in multisets(n, d as u32) {
                let _ = self.get(g, &ds);
            }
        }
    }

    /// Entries that violate the string or dilaton equation against the table.
    pub fn closure_defects(&self) -> Vec<(u32, Vec<u32>)> {
        let look = |g: u32, ds: &[u32]| -> Option<Rational> {
            if !dimension_matches(g, ds) {
                return Some(Rational::zero());
            }
            let mut k = ds.to_vec();
            k.sort_unstable();
            self.entries.get(&(g, k)).cloned()
        };
        let mut bad = Vec::new();
        for ((g, ds), v) in &self.entries {
            let (g, n) = (*g, ds.len());
            if (g, ds.as_slice()) == (0, &[0, 0, 0][..]) || (g, ds.as_slice()) == (1, &[1][..]) {
                continue;
            }
            if ds[0] == 0 {
                let rest = &ds[1..];
                let mut total = Some(Rational::zero());
                for j in 0..rest.len() {
                    if rest[j] == 0 {
                        continue;
                    }
                    let mut lowered = rest.to_vec();
                    lowered[j] -= 1;
                    total = total.and_then(|t| look(g, &lowered).map(|x| t + x));
                }
                if total.as_ref() != Some(v) {
                    bad.push((g, ds.clone()));
                    continue;
                }
            }
            if let Some(pos) = ds.iter().position(|&d| d == 1) {
                let mut rest = ds.clone();
                rest.remove(pos);
                let expect = look(g, &rest).map(|x| rat(2 * g as i64 - 2 + n as i64 - 1) * x);
                if expect.as_ref() != Some(v) {
                    bad.push((g, ds.clone()));
                }
            }
        }
        bad
    }
}

/// Weakly increasing `n`-tuples with sum `d`.
fn multisets(n: u32, d: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, d: u32, min: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            if d == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for k in min..=d {
            if k * n > d {
                break;
            }
            prefix.push(k);
            go(n - 1, d - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, d, 0, &mut Vec::new(), &mut out);
    out
}
