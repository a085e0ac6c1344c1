//! Two-layer color coding and its variants.
//!
//! A [`PartitionFamily`] assigns every item index to one of `m * g` cells in
//! each of `r` repetitions. Cell `c` belongs to group `c / g`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CCParams {
    /// Groups per partition.
    pub m: u64,
    /// Cells per group.
    pub g: u64,
    /// Repetitions of the second layer.
    pub r: u64,
}

impl CCParams {
    pub fn cells(&self) -> u64 {
        self.m * self.g
    }

    fn validate(&self) -> Result<()> {
        if !self.m.is_power_of_two() || !self.g.is_power_of_two() || self.r == 0 {
            return Err(Error::InvalidParameter(format!("bad color-coding parameters {self:?}")));
        }
        Ok(())
    }
}

/// Smallest power of two at least `x`, tolerating float noise just above an integer.
fn pow2_at_least(x: f64) -> u64 {
    let c = (x - 1e-9).ceil().max(1.0) as u64;
    c.next_power_of_two()
}

/// Parameters for sets of at most `k` items with failure probability `q`.
pub fn cc_params(k: u64, q: f64) -> Result<CCParams> {
    if k == 0 || !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("need k >= 1 and 0 < q < 1, got k={k}, q={q}")));
    }
    let ratio = k as f64 / q;
    if ratio <= 2.0 {
        return Err(Error::InvalidParameter(format!("k/q = {ratio} must exceed 2")));
    }
    let log = ratio.log2();
    Ok(CCParams {
        m: pow2_at_least(k as f64 / log),
        g: pow2_at_least(36.0 * log * log),
        r: (log - 1e-9).ceil() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionFamily {
    pub params: CCParams,
    /// `assignment[j][i]` is the cell of item `i` in repetition `j`.
    pub assignment: Vec<Vec<u64>>,
}

impl PartitionFamily {
    pub fn items(&self) -> usize {
        self.assignment.first().map_or(0, Vec::len)
    }

    /// Nonempty cells of repetition `j`, keyed by cell index, items in input order.
    pub fn cells(&self, j: usize) -> BTreeMap<u64, Vec<usize>> {
        let mut out: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, &c) in self.assignment[j].iter().enumerate() {
            out.entry(c).or_default().push(i);
        }
        out
    }

    /// Sum over the cells of repetition `j` of the largest value in the cell.
    pub fn max_sum(&self, j: usize, values: &[u64]) -> u64 {
        let mut best: BTreeMap<u64, u64> = BTreeMap::new();
        for (i, &c) in self.assignment[j].iter().enumerate() {
            let e = best.entry(c).or_default();
            *e = (*e).max(values[i]);
        }
        best.values().sum()
    }

    /// Indices of the first occurrence of each distinct repetition.
    pub fn distinct_repetitions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for j in 0..self.assignment.len() {
            if !out.iter().any(|&o| self.assignment[o] == self.assignment[j]) {
                out.push(j);
            }
        }
        out
    }

    /// Checks that every repetition places each item in exactly one valid cell.
    pub fn check_partition(&self) -> Result<()> {
        let cells = self.params.cells();
        if self.assignment.len() as u64 != self.params.r {
            return Err(Error::ContractBreach("repetition count mismatch".into()));
        }
        let n = self.items();
        for rep in &self.assignment {
            if rep.len() != n || rep.iter().any(|&c| c >= cells) {
                return Err(Error::ContractBreach("assignment outside the cell range".into()));
            }
        }
        Ok(())
    }
}

/// Stream 0 drives the first layer; repetition `j`, group `i` uses stream
/// `1 + j * m + i`, so draws do not depend on evaluation order.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Random two-layer partition of `n` items.
pub fn color_coding(n: usize, k: u64, q: f64, seed: u64) -> Result<PartitionFamily> {
    let params = cc_params(k, q)?;
    Ok(color_coding_with(n, params, seed))
}

fn color_coding_with(n: usize, params: CCParams, seed: u64) -> PartitionFamily {
    let CCParams { m, g, r } = params;
    let mut first = stream(seed, 0);
    let group: Vec<u64> = (0..n).map(|_| first.gen_range(0..m)).collect();
    let mut members: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &grp) in group.iter().enumerate() {
        members.entry(grp).or_default().push(i);
    }
    let mut assignment = vec![vec![0u64; n]; r as usize];
    for (j, rep) in assignment.iter_mut().enumerate() {
        for (&grp, items) in &members {
            let mut rng = stream(seed, 1 + j as u64 * m + grp);
            for &i in items {
                rep[i] = grp * g + rng.gen_range(0..g);
            }
        }
    }
    PartitionFamily { params, assignment }
}

/// Item `i` goes to cell `i` in every repetition.
pub fn small_color_coding(n: usize, params: CCParams) -> Result<PartitionFamily> {
    params.validate()?;
    if n as u64 > params.cells() {
        return Err(Error::Precondition(format!("{n} items do not fit in {} cells", params.cells())));
    }
    let rep: Vec<u64> = (0..n as u64).collect();
    Ok(PartitionFamily { params, assignment: vec![rep; params.r as usize] })
}

/// Variant that reserves singleton cells for the first `m g / 2` items, so the
/// cell maxima always add up to a large fraction of the total.
///
/// Degenerate inputs (`k <= 2` or `k/q <= 2`) get one item per cell and a
/// single repetition, which loses nothing.
pub fn modified_color_coding(n: usize, k: u64, q: f64, seed: u64) -> Result<PartitionFamily> {
    if k == 0 || !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("need k >= 1 and 0 < q < 1, got k={k}, q={q}")));
    }
    if k <= 2 || k as f64 / q <= 2.0 {
        let g = (n.max(1) as u64).next_power_of_two();
        return small_color_coding(n, CCParams { m: 1, g, r: 1 });
    }
    let inner = cc_params(k, q)?;
    let params = CCParams { m: 2 * inner.m, ..inner };
    let half = params.cells() / 2;
    if n as u64 <= half {
        return small_color_coding(n, params);
    }
    let rest = color_coding_with(n - half as usize, inner, seed);
    let offset = half;
    let assignment = rest
        .assignment
        .into_iter()
        .map(|tail| (0..half).chain(tail.into_iter().map(|c| c + offset)).collect())
        .collect();
    Ok(PartitionFamily { params, assignment })
}

/// Default overall failure probability `(n + 1/ε)^-2`.
pub fn default_q_star(n: usize, inv_eps: u64) -> f64 {
    let base = n as f64 + inv_eps as f64;
    1.0 / (base * base)
}

/// Color coding for the window `[β/ε, 2β/ε]` over values in `[1/ε, 2/ε]`:
/// `k = 2β` and `q = q* ε / (2β)`.
pub fn window_color_coding(values: &[u64], beta: u64, inv_eps: u64, q_star: f64, seed: u64) -> Result<PartitionFamily> {
    if beta == 0 || inv_eps == 0 {
        return Err(Error::InvalidParameter("beta and 1/eps must be positive".into()));
    }
    if let Some(&v) = values.iter().find(|&&v| v < inv_eps || v > 2 * inv_eps) {
        return Err(Error::Precondition(format!("value {v} outside [{inv_eps}, {}]", 2 * inv_eps)));
    }
    let total: u128 = values.iter().map(|&v| v as u128).sum();
    if total < 4 * beta as u128 * inv_eps as u128 {
        return Err(Error::Precondition(format!("total {total} below {}", 4 * beta as u128 * inv_eps as u128)));
    }
    window_color_coding_relaxed(values.len(), beta, inv_eps, q_star, seed)
}

/// [`window_color_coding`] without the input checks.
pub fn window_color_coding_relaxed(n: usize, beta: u64, inv_eps: u64, q_star: f64, seed: u64) -> Result<PartitionFamily> {
    let k = 2 * beta;
    let q = q_star / (inv_eps as f64 * k as f64);
    modified_color_coding(n, k, q, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_examples() {
        assert_eq!(cc_params(8, 0.5).unwrap(), CCParams { m: 2, g: 1024, r: 4 });
        assert_eq!(cc_params(2, 0.5).unwrap(), CCParams { m: 1, g: 256, r: 2 });
        assert!(cc_params(1, 0.5).is_err());
        assert!(cc_params(4, 1.0).is_err());
    }

    #[test]
    fn single_item_lands_in_one_cell() {
        let fam = color_coding(1, 8, 0.5, 3).unwrap();
        for j in 0..fam.assignment.len() {
            let cells = fam.cells(j);
            assert_eq!(cells.len(), 1);
            assert_eq!(cells.values().next().unwrap(), &vec![0]);
        }
    }

    #[test]
    fn small_is_identity() {
        let fam = small_color_coding(3, CCParams { m: 2, g: 2, r: 3 }).unwrap();
        assert_eq!(fam.assignment, vec![vec![0, 1, 2]; 3]);
        assert!(small_color_coding(5, CCParams { m: 2, g: 2, r: 1 }).is_err());
    }

    #[test]
    fn modified_reserves_singletons() {
        let n = 5000;
        let fam = modified_color_coding(n, 4, 0.01, 11).unwrap();
        fam.check_partition().unwrap();
        let half = (fam.params.cells() / 2) as usize;
        assert!(n > half);
        for rep in &fam.assignment {
            assert!(rep[..half].iter().enumerate().all(|(i, &c)| c == i as u64));
            assert!(rep[half..].iter().all(|&c| c >= half as u64));
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = color_coding(200, 16, 0.1, 99).unwrap();
        let b = color_coding(200, 16, 0.1, 99).unwrap();
        let c = color_coding(200, 16, 0.1, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
