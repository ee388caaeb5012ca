use std::collections::BTreeMap;

use super::OracleError;

const MAX_K: u32 = 6;

/// Gluings of the sides of a `2k`-gon in pairs, counted by genus.
pub fn one_face_maps(k: u32) -> Result<BTreeMap<u32, u64>, OracleError> {
    if k > MAX_K {
        return Err(OracleError::TooLarge(k, MAX_K));
    }
    let sides = 2 * k as usize;
    let mut pairing = vec![usize::MAX; sides];
    let mut counts = BTreeMap::new();
    glue(&mut pairing, k, &mut counts);
    Ok(counts)
}

fn glue(pairing: &mut [usize], k: u32, counts: &mut BTreeMap<u32, u64>) {
    let Some(first) = pairing.iter().position(|&p| p == usize::MAX) else {
        // V - E + F = 2 - 2g with F = 1, E = k
        let v = vertex_count(pairing) as u32;
        *counts.entry((k + 1 - v) / 2).or_insert(0) += 1;
        return;
    };
    for other in first + 1..pairing.len() {
        if pairing[other] != usize::MAX {
            continue;
        }
        pairing[first] = other;
        pairing[other] = first;
        glue(pairing, k, counts);
        pairing[first] = usize::MAX;
        pairing[other] = usize::MAX;
    }
}

/// Cycles of `γ ∘ π`, `γ` the rotation `i ↦ i + 1`.
fn vertex_count(pairing: &[usize]) -> usize {
    let n = pairing.len();
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = (pairing[i] + 1) % n;
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_polygons() {
        assert_eq!(one_face_maps(1).unwrap(), BTreeMap::from([(0, 1)]));
        assert_eq!(one_face_maps(2).unwrap(), BTreeMap::from([(0, 2), (1, 1)]));
        assert_eq!(one_face_maps(3).unwrap(), BTreeMap::from([(0, 5), (1, 10)]));
    }

    #[test]
    fn totals_are_double_factorials() {
        let mut df = 1u64;
        for k in 1..=MAX_K {
            df *= 2 * k as u64 - 1;
            assert_eq!(one_face_maps(k).unwrap().values().sum::<u64>(), df);
        }
        assert!(one_face_maps(7).is_err());
    }
}
