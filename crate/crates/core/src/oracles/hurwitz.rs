use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::OracleError;
use crate::algebra::{factorial, rat, Rational};

/// Weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self, OracleError> {
        if parts.is_empty() {
            return Err(OracleError::InvalidPartition("empty".into()));
        }
        if parts.contains(&0) {
            return Err(OracleError::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn length(&self) -> u32 {
        self.parts.len() as u32
    }

    /// `Π m_i!` over the multiplicities.
    pub fn automorphisms(&self) -> Rational {
        let mut mult: BTreeMap<u32, u64> = BTreeMap::new();
        for &p in &self.parts {
            *mult.entry(p).or_insert(0) += 1;
        }
        mult.values().map(|&m| factorial(m)).product()
    }

    /// `2g - 2 + l(μ) + |μ|`, when nonnegative.
    pub fn simple_branch_points(&self, g: u32) -> Option<u32> {
        let r = 2 * g as i64 - 2 + self.length() as i64 + self.size() as i64;
        (r >= 0).then_some(r as u32)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Cycle types of a product of transpositions, grouped by the orbits of
/// the transpositions applied so far.
type State = Vec<Vec<u32>>;

fn normalize(mut state: State) -> State {
    for c in &mut state {
        c.sort_unstable_by(|a, b| b.cmp(a));
    }
    state.sort();
    state
}

/// Applies one more simple branch point: every transposition either cuts a
/// cycle or joins two, possibly merging two orbits.
fn evolve(states: &BTreeMap<State, BigInt>) -> BTreeMap<State, BigInt> {
    let mut next: BTreeMap<State, BigInt> = BTreeMap::new();
    let mut push = |s: State, w: BigInt| {
        *next.entry(normalize(s)).or_insert_with(BigInt::zero) += w;
    };
    for (state, count) in states {
        for (ci, comp) in state.iter().enumerate() {
            for (pi, &len) in comp.iter().enumerate() {
                // cut
                for i in 1..=len / 2 {
                    let weight = if 2 * i == len { len / 2 } else { len };
                    let mut s = state.clone();
                    s[ci].remove(pi);
                    s[ci].extend([i, len - i]);
                    push(s, count * BigInt::from(weight));
                }
                // join inside the orbit
                for (qi, &other) in comp.iter().enumerate().skip(pi + 1) {
                    let mut s = state.clone();
                    s[ci][pi] = len + other;
                    s[ci].remove(qi);
                    push(s, count * BigInt::from(len * other));
                }
                // join across orbits
                for (cj, comp2) in state.iter().enumerate().skip(ci + 1) {
                    for (qj, &other) in comp2.iter().enumerate() {
                        let mut s = state.clone();
                        let mut merged = s[cj].clone();
                        merged.remove(qj);
                        s[ci][pi] = len + other;
                        s[ci].extend(merged);
                        s.remove(cj);
                        push(s, count * BigInt::from(len * other));
                    }
                }
            }
        }
    }
    next
}

/// Connected simple Hurwitz number `h_{g,μ}`: transitive factorizations
/// counted with weight `1/|μ|!`.
pub fn cut_and_join_hurwitz(g: u32, mu: &Partition) -> Result<Rational, OracleError> {
    let r = mu.simple_branch_points(g).ok_or_else(|| {
        OracleError::InvalidPartition(format!("{mu} admits no genus {g} cover"))
    })?;
    let d = mu.size();
    let mut states: BTreeMap<State, BigInt> = BTreeMap::from([(vec![vec![1]; d as usize], BigInt::one())]);
    for _ in 0..r {
        states = evolve(&states);
    }
    let target = vec![mu.parts.clone()];
    let count = states.get(&target).cloned().unwrap_or_else(BigInt::zero);
    Ok(Rational::from_integer(count) / factorial(d as u64))
}

/// `H_{g,μ} = |Aut μ| Π μ_i h_{g,μ} / r!`: the coefficient of `Π e^{μ_i x_i} dx_i`.
pub fn normalized_hurwitz(g: u32, mu: &Partition) -> Result<Rational, OracleError> {
    let h = cut_and_join_hurwitz(g, mu)?;
    let r = mu.simple_branch_points(g).expect("checked above");
    let prod: Rational = mu.parts.iter().map(|&p| rat(p as i64)).product();
    Ok(h * mu.automorphisms() * prod / factorial(r as u64))
}

/// `H_{0,1..=n_max}` from `(n-1)/n H_n = (1/2) Σ H_k H_{n-k}`, `H_1 = 1`.
pub fn genus0_one_part(n_max: u32) -> Vec<Rational> {
    let mut h = vec![Rational::zero(), Rational::one()];
    for n in 2..=n_max as usize {
        let mut sum = Rational::zero();
        for k in 1..n {
            sum += &h[k] * &h[n - k];
        }
        h.push(sum / rat(2) * rat(n as i64) / rat(n as i64 - 1));
    }
    h.truncate(n_max as usize + 1);
    h.remove(0);
    h
}
