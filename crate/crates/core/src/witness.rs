//! Witness recovery: partial levels for dense tiers, the retained trace, and
//! descent from an output value to a concrete subset of items.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::color::PartitionFamily;
use crate::density::DensityVerdict;
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::level::{
    charged_nodes, clip_level, clip_root, full_next, level_density, level_zero, round_level, scaled_pairs, sparse_ceiling,
    unite, witness_item_cap, LeafMap, Level, PipelineStats, Provenance, ValueSet, WindowParams,
};
use crate::sumset::{sparse_sumset, sumset_size_at_least};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialSumset {
    pub set: IntSet,
    pub k: u64,
}

/// A `k`-element subset of `A + B` containing 0 and `max A + max B`; the rest
/// are the smallest available sums.
pub fn partial_sumset(a: &IntSet, b: &IntSet, k: u64) -> Result<PartialSumset> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("partial_sumset"));
    }
    if !a.contains(0) || !b.contains(0) {
        return Err(Error::Precondition("both sets must contain 0".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let top = a.universe() + b.universe();
    if k == 1 {
        if top != 0 {
            return Err(Error::ContractBreach("a single sum cannot hold both 0 and the maximum".into()));
        }
        return Ok(PartialSumset { set: IntSet::zero(), k });
    }
    let pool = if a.len() as u64 >= k {
        a.union(&IntSet::from([top]))
    } else {
        let test = sumset_size_at_least(a, b, k)?;
        if !test.at_least {
            return Err(Error::ContractBreach(format!("|A + B| < {k}")));
        }
        // Smallest prefix of B whose sumset with A reaches k elements.
        let (mut lo, mut hi) = (1usize, b.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let prefix = IntSet::from_sorted(b[..mid].to_vec());
            if sumset_size_at_least(a, &prefix, k)?.at_least {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let prefix = IntSet::from_sorted(b[..lo].to_vec());
        sparse_sumset(a, &prefix)?.union(&IntSet::from([top]))
    };
    let mut chosen: Vec<u64> = pool.iter().copied().filter(|&x| x != 0 && x != top).take(k as usize - 2).collect();
    chosen.push(0);
    chosen.push(top);
    let set = IntSet::from_unsorted(chosen);
    debug_assert_eq!(set.len() as u64, k);
    Ok(PartialSumset { set, k })
}

/// Next level of a rounded level. Sparse pairs are computed in full; on a
/// dense verdict, pairs in `I` get a partial sumset of the guaranteed size and
/// the others keep only `{0, max + max}`.
pub fn compute_partial_level(level: &Level, params: &WindowParams) -> Result<(Level, bool)> {
    let pairs = scaled_pairs(level);
    let report = level_density(&pairs, params)?;
    match report.verdict {
        DensityVerdict::Dense { indices, size_floor } if params.allow_dense => {
            let g = 1u64 << (level.height + 1);
            let chosen: std::collections::BTreeSet<usize> = indices.into_iter().collect();
            let mut next =
                Level { height: level.height + 1, len: level.len / 2, nodes: BTreeMap::new(), err_cum: level.err_cum };
            for (k, (p, a, b)) in pairs.iter().enumerate() {
                let z = if chosen.contains(&k) {
                    partial_sumset(a, b, size_floor)?.set
                } else {
                    IntSet::from([0, a.universe() + b.universe()])
                };
                let z = z.scale_up(g);
                if !z.is_zero() {
                    next.nodes.insert(*p, Arc::new(z));
                }
            }
            // Pairs outside `I` keep two elements unless both halves are `{0}`.
            let bound = 2 * (level.len / 2 - chosen.len() as u64) + chosen.len() as u64 * size_floor;
            if next.total_size() > bound {
                return Err(Error::ContractBreach(format!("partial level of size {} exceeds {bound}", next.total_size())));
            }
            Ok((next, true))
        }
        verdict => {
            let next = full_next(level, &pairs, &report.computed, &params.sumset)?;
            if matches!(verdict, DensityVerdict::Sparse { .. }) && next.total_size() > sparse_ceiling(level, params) {
                return Err(Error::ContractBreach("sparse level exceeds its size bound".into()));
            }
            Ok((next, false))
        }
    }
}

/// One height of one tree: the level as computed and after rounding.
#[derive(Debug, Clone)]
struct Tier {
    computed: Level,
    rounded: Level,
}

/// Everything needed to turn an output value back into items.
#[derive(Debug, Clone)]
pub struct TraceTree {
    /// Per distinct repetition, the tiers at heights `0 .. log g`.
    bottom: Vec<Vec<Tier>>,
    /// Per distinct repetition, the computed level at height `log g`.
    crowns: Vec<Level>,
    leaves: Vec<LeafMap>,
    /// For each position at height `log g`, value -> repetition.
    provenance: BTreeMap<u64, BTreeMap<u64, usize>>,
    /// Tiers at heights `log g .. log(m g)` above the union.
    top: Vec<Tier>,
    root: IntSet,
    pub delta_cert: u64,
}

impl TraceTree {
    pub fn root(&self) -> &IntSet {
        &self.root
    }

    /// Item indices whose values add up to within `delta_cert` of `value`.
    pub fn backtrack(&self, value: u64) -> Result<Vec<usize>> {
        if !self.root.contains(value) {
            return Err(Error::Precondition(format!("{value} is not in the root set")));
        }
        // Descend the top tiers from the root to the union height.
        let mut frontier: Vec<(u64, u64)> = vec![(0, value)];
        for tier in self.top.iter().rev() {
            frontier = split_all(&frontier, tier)?;
        }
        let mut items = Vec::new();
        for (pos, y) in frontier {
            if y == 0 {
                continue;
            }
            let rep = *self
                .provenance
                .get(&pos)
                .and_then(|t| t.get(&y))
                .ok_or_else(|| Error::ContractBreach(format!("no provenance for {y} at position {pos}")))?;
            debug_assert!(self.crowns[rep].node(pos).contains(y));
            let mut local = vec![(pos, y)];
            for tier in self.bottom[rep].iter().rev() {
                local = split_all(&local, tier)?;
            }
            for (cell, v) in local {
                if v == 0 {
                    continue;
                }
                let cands = self.leaves[rep]
                    .get(&cell)
                    .ok_or_else(|| Error::ContractBreach(format!("leaf {cell} is empty")))?;
                let k = cands.partition_point(|&(x, _)| x < v);
                match cands.get(k) {
                    Some(&(x, item)) if x == v => items.push(item),
                    _ => return Err(Error::ContractBreach(format!("leaf {cell} has no item of value {v}"))),
                }
            }
        }
        items.sort_unstable();
        Ok(items)
    }
}

/// Splits each `(position, value)` at height `h + 1` into its two children at
/// height `h`, undoing that height's rounding.
fn split_all(frontier: &[(u64, u64)], tier: &Tier) -> Result<Vec<(u64, u64)>> {
    let h = tier.rounded.height;
    let g = 1u64 << (h + 1);
    let mut out = Vec::with_capacity(frontier.len() * 2);
    for &(p, y) in frontier {
        if y == 0 {
            continue;
        }
        let (l, r) = (tier.rounded.node(2 * p), tier.rounded.node(2 * p + 1));
        let (small, large, small_left) = if l.len() <= r.len() { (l, r, true) } else { (r, l, false) };
        let a = small
            .iter()
            .copied()
            .find(|&a| a <= y && large.contains(y - a))
            .ok_or_else(|| Error::ContractBreach(format!("{y} does not split at height {h}")))?;
        let (lv, rv) = if small_left { (a, y - a) } else { (y - a, a) };
        for (child, v) in [(2 * p, lv), (2 * p + 1, rv)] {
            let pre = tier.computed.node(child);
            let orig = unround(pre, v, g)
                .ok_or_else(|| Error::ContractBreach(format!("rounded {v} has no preimage at height {h}")))?;
            out.push((child, orig));
        }
    }
    Ok(out)
}

/// An element of `pre` that rounds up to `v` at granularity `g`.
fn unround(pre: &IntSet, v: u64, g: u64) -> Option<u64> {
    let x = pre.floor(v)?;
    (x + g > v).then_some(x)
}

pub(crate) fn run(values: &[u64], family: &PartitionFamily, params: &WindowParams) -> Result<(ValueSet, TraceTree, PipelineStats)> {
    if family.params != params.cc {
        return Err(Error::Precondition("family was built with different parameters".into()));
    }
    let cap = witness_item_cap(values.len(), params.beta);
    let reps = family.distinct_repetitions();
    let mut stats = PipelineStats { repetitions: reps.len(), ..Default::default() };
    let mut current = Vec::with_capacity(reps.len());
    let mut leaves = Vec::with_capacity(reps.len());
    for &j in &reps {
        let (l, m) = level_zero(family, j, values)?;
        current.push(l);
        leaves.push(m);
    }
    let hg = params.union_height();
    let root_h = params.root_height();
    let mut bottom: Vec<Vec<Tier>> = vec![Vec::new(); reps.len()];
    let mut top: Vec<Tier> = Vec::new();
    let mut crowns = Vec::new();
    let mut provenance = BTreeMap::new();
    let mut dense = false;
    for h in 0..=root_h {
        if h == hg {
            let (u, prov) = unite(&current);
            crowns = std::mem::replace(&mut current, vec![u]);
            provenance = prov;
        }
        if h == root_h {
            break;
        }
        let charged = charged_nodes(&current, cap);
        let mut next = Vec::with_capacity(current.len());
        for (r, l) in current.into_iter().enumerate() {
            debug_assert!(l.check(params.inv_eps).is_ok());
            let rounded = clip_level(round_level(&l, charged), params.node_cap());
            let (n, was_dense) = compute_partial_level(&rounded, params)?;
            if was_dense && !dense {
                dense = true;
                stats.first_dense = Some((h, (h < hg).then_some(r)));
            }
            stats.largest_level = stats.largest_level.max(n.total_size());
            let tier = Tier { computed: l, rounded };
            if h < hg {
                bottom[r].push(tier);
            } else {
                top.push(tier);
            }
            next.push(n);
        }
        current = next;
    }
    stats.levels = root_h;
    let root_level = &current[0];
    let delta = root_level.err_cum + if dense { 2 * params.beta } else { 0 };
    let root = clip_root(root_level.node(0), params, delta);
    let vs = ValueSet {
        elements: root.clone(),
        window: params.window(),
        delta_cert: delta,
        provenance: Provenance::TreeRoot,
    };
    let trace = TraceTree { bottom, crowns, leaves, provenance, top, root, delta_cert: delta };
    Ok((vs, trace, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partial(a: &IntSet, b: &IntSet, k: u64) {
        let full = crate::sumset::dense_sumset(a, b).unwrap();
        let h = partial_sumset(a, b, k).unwrap().set;
        assert_eq!(h.len() as u64, k);
        assert!(h.is_subset_of(&full));
        assert!(h.contains(0) && h.contains(a.universe() + b.universe()));
    }

    #[test]
    fn partial_examples() {
        let (a, b) = (IntSet::from([0, 1]), IntSet::from([0, 3]));
        check_partial(&a, &b, 3);
        assert_eq!(partial_sumset(&a, &b, 4).unwrap().set.as_slice(), &[0, 1, 3, 4]);
        assert_eq!(partial_sumset(&IntSet::zero(), &IntSet::zero(), 1).unwrap().set, IntSet::zero());
        assert!(partial_sumset(&a, &b, 5).is_err());
    }

    #[test]
    fn partial_uses_prefixes() {
        let a = IntSet::from([0, 2, 9]);
        let b = IntSet::from([0, 1, 5, 30, 31, 70]);
        for k in 2..=15 {
            check_partial(&a, &b, k);
        }
    }

    #[test]
    fn unround_picks_preimage() {
        let pre = IntSet::from([0, 3, 5]);
        assert_eq!(unround(&pre, 4, 2), Some(3));
        assert_eq!(unround(&pre, 6, 2), Some(5));
        assert_eq!(unround(&pre, 8, 2), None);
    }
}
