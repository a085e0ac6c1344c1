//! Density of a level: deciding whether the next level is small enough to
//! compute, and the grid used when it is not.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::sumset::sumset_size_at_least;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityVerdict {
    /// The pairwise sumsets form a `level_gamma`-sparse collection.
    Sparse { level_gamma: u64 },
    /// Every pair in `indices` has a sumset of at least `size_floor` elements.
    Dense { indices: Vec<usize>, size_floor: u64 },
}

impl DensityVerdict {
    pub fn is_dense(&self) -> bool {
        matches!(self, DensityVerdict::Dense { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityConfig {
    pub c: u64,
    pub gamma: u64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { c: 4, gamma: 4 }
    }
}

impl DensityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c == 0 || self.gamma == 0 {
            return Err(Error::InvalidParameter("c and gamma must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn log2_floor(x: u64) -> u32 {
    63 - x.leading_zeros()
}

pub(crate) fn log2_ceil(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Whether some `k` in `[2, u + 1]` has at least `c γ u / (k - 1)` sizes `>= k`.
pub fn is_gamma_dense_bruteforce(sizes: &[u64], gamma: u64, u: u64, c: u64) -> bool {
    let need = c as u128 * gamma as u128 * u as u128;
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    (2..=u + 1).any(|k| {
        let count = sorted.partition_point(|&s| s >= k) as u128;
        count * (k as u128 - 1) >= need
    })
}

/// `ℓ + c γ u (1 + ⌈log u⌉)`: the most a sparse collection can hold.
pub fn sparse_total_size_bound(ell: u64, gamma: u64, u: u64, c: u64) -> u64 {
    ell + c * gamma * u * (1 + log2_ceil(u) as u64)
}

/// `{w + j δ : 0 <= j <= ⌊(v - w) / δ⌋}`.
pub fn grid_approximation(w: u64, v: u64, delta: u64) -> Result<IntSet> {
    if delta == 0 {
        return Err(Error::InvalidParameter("grid spacing must be positive".into()));
    }
    if w > v {
        return Err(Error::Precondition(format!("empty grid window [{w}, {v}]")));
    }
    Ok(IntSet::from_sorted((0..=(v - w) / delta).map(|j| w + j * delta).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub verdict: DensityVerdict,
    /// Threshold queries issued.
    pub queries: u64,
    /// `Σ (2^j - 1) |I_j|` over rounds that did not return.
    pub weighted_work: u128,
    /// Pair sumsets that the threshold queries happened to compute in full.
    pub computed: BTreeMap<usize, IntSet>,
}

/// Density estimate over the pairs `(A_{2i}, A_{2i+1})` of `nodes`.
pub fn estimate_density(nodes: &[IntSet], gamma: u64, u: u64, c: u64) -> Result<DensityReport> {
    if !nodes.len().is_multiple_of(2) {
        return Err(Error::Precondition("level must have an even number of nodes".into()));
    }
    let pairs: Vec<(usize, &IntSet, &IntSet)> =
        nodes.chunks(2).enumerate().map(|(i, p)| (i, &p[0], &p[1])).collect();
    estimate_density_pairs(&pairs, gamma, u, c)
}

/// Like [`estimate_density`] but takes only the pairs that may reach size 2;
/// any pair not listed is `{0} + {0}`.
pub fn estimate_density_pairs(pairs: &[(usize, &IntSet, &IntSet)], gamma: u64, u: u64, c: u64) -> Result<DensityReport> {
    if gamma == 0 || c == 0 || u == 0 {
        return Err(Error::InvalidParameter("gamma, c and u must be positive".into()));
    }
    for &(_, a, b) in pairs {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet("estimate_density"));
        }
        if a.universe() > u || b.universe() > u {
            return Err(Error::Precondition(format!("node exceeds universe {u}")));
        }
    }
    let need = 2 * c as u128 * gamma as u128 * u as u128;
    let rounds = log2_floor(2 * u + 1);
    let mut report = DensityReport {
        verdict: DensityVerdict::Sparse { level_gamma: 4 * gamma },
        queries: 0,
        weighted_work: 0,
        computed: BTreeMap::new(),
    };
    let mut exact: BTreeMap<usize, u64> = BTreeMap::new();
    let mut alive: Vec<(usize, &IntSet, &IntSet)> = pairs.to_vec();
    for j in 1..=rounds {
        let threshold = 1u64 << j;
        let mut next = Vec::with_capacity(alive.len());
        for &(i, a, b) in &alive {
            let passes = match exact.get(&i) {
                Some(&size) => size >= threshold,
                None => {
                    report.queries += 1;
                    let test = sumset_size_at_least(a, b, threshold)?;
                    if let Some(s) = test.sumset {
                        exact.insert(i, s.len() as u64);
                        report.computed.insert(i, s);
                    }
                    test.at_least
                }
            };
            if passes {
                next.push((i, a, b));
            }
        }
        alive = next;
        let mass = alive.len() as u128 * (threshold as u128 - 1);
        if mass >= need {
            let size_floor = (need.div_ceil(alive.len() as u128) + 1) as u64;
            let indices = alive.iter().map(|&(i, _, _)| i).collect();
            report.verdict = DensityVerdict::Dense { indices, size_floor };
            return Ok(report);
        }
        report.weighted_work += mass;
        if alive.is_empty() {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bruteforce_examples() {
        assert!(!is_gamma_dense_bruteforce(&[1, 1, 1], 1, 5, 1));
        assert!(is_gamma_dense_bruteforce(&[9], 1, 8, 1));
        assert!(!is_gamma_dense_bruteforce(&[9], 2, 8, 1));
        assert!(!is_gamma_dense_bruteforce(&[9], 16, 8, 4));
    }

    #[test]
    fn size_bound_examples() {
        assert_eq!(sparse_total_size_bound(4, 1, 4, 4), 52);
        assert_eq!(sparse_total_size_bound(7, 3, 1, 2), 7 + 6);
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_approximation(10, 20, 5).unwrap().as_slice(), &[10, 15, 20]);
        assert_eq!(grid_approximation(7, 7, 3).unwrap().as_slice(), &[7]);
        assert_eq!(grid_approximation(7, 9, 5).unwrap().as_slice(), &[7]);
        assert!(grid_approximation(9, 7, 1).is_err());
    }

    #[test]
    fn single_interval_pair_is_sparse() {
        let a = IntSet::interval(0, 4);
        let r = estimate_density(&[a.clone(), a], 1, 4, 4).unwrap();
        assert_eq!(r.verdict, DensityVerdict::Sparse { level_gamma: 4 });
    }

    #[test]
    fn many_pairs_go_dense_at_first_round() {
        let (gamma, u, c) = (1, 3, 2);
        let nodes = vec![IntSet::from([0, 1]); 2 * 12];
        let r = estimate_density(&nodes, gamma, u, c).unwrap();
        match r.verdict {
            DensityVerdict::Dense { indices, size_floor } => {
                assert_eq!(indices.len(), 12);
                assert_eq!(size_floor, 2);
            }
            v => panic!("expected dense, got {v:?}"),
        }
    }
}
