//! The sumset tree over one window `[β/ε, 2β/ε]`.
//!
//! Values are integers in window units: items lie in `[E, 2E]` where `E = 1/ε`.
//! Level `h` has `ℓ = m g / 2^h` nodes; only nodes other than `{0}` are stored.
//! The bottom `log g` levels run once per distinct color-coding repetition,
//! in lockstep, then the per-group results are united and the top `log m`
//! levels run once.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::color::{CCParams, PartitionFamily};
use crate::density::{
    estimate_density_pairs, grid_approximation, log2_floor, sparse_total_size_bound, DensityVerdict,
};
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::sumset::{sumset, SumsetConfig};
use crate::witness::{self, TraceTree};

pub(crate) fn zero_set() -> &'static IntSet {
    static ZERO: OnceLock<IntSet> = OnceLock::new();
    ZERO.get_or_init(IntSet::zero)
}

/// Everything the tree needs to know about one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    /// `E = 1/ε`.
    pub inv_eps: u64,
    pub beta: u64,
    pub cc: CCParams,
    /// Density parameter; defaults to `max(4, ⌈4 m g / β⌉)`.
    pub gamma: u64,
    /// Density constant.
    pub c: u64,
    pub sumset: SumsetConfig,
    /// When false, dense verdicts are ignored and every level is computed in full.
    pub allow_dense: bool,
}

impl WindowParams {
    pub fn new(inv_eps: u64, beta: u64, cc: CCParams, c: u64) -> Self {
        let gamma = (4 * cc.cells()).div_ceil(beta).max(4);
        WindowParams { inv_eps, beta, cc, gamma, c, sumset: SumsetConfig::default(), allow_dense: true }
    }

    pub fn window(&self) -> (u64, u64) {
        (self.beta * self.inv_eps, 2 * self.beta * self.inv_eps)
    }

    /// Largest node value that can still reach a kept root value; rounding
    /// only moves values up the tree.
    pub fn node_cap(&self) -> u64 {
        4 * self.beta * self.inv_eps
    }

    /// Universe handed to the density estimate for scaled nodes.
    pub fn density_universe(&self) -> u64 {
        2 * self.inv_eps
    }

    /// Height of the root, `log(m g)`.
    pub fn root_height(&self) -> u32 {
        log2_floor(self.cc.cells())
    }

    /// Height at which repetitions are united, `log g`.
    pub fn union_height(&self) -> u32 {
        log2_floor(self.cc.g)
    }

    fn validate(&self) -> Result<()> {
        if self.inv_eps == 0 || self.beta == 0 || self.gamma == 0 || self.c == 0 {
            return Err(Error::InvalidParameter("window parameters must be positive".into()));
        }
        if !self.cc.m.is_power_of_two() || !self.cc.g.is_power_of_two() {
            return Err(Error::InvalidParameter("m and g must be powers of two".into()));
        }
        self.sumset.validate()
    }
}

/// One tier of the tree. Absent positions hold `{0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub height: u32,
    pub len: u64,
    pub nodes: BTreeMap<u64, Arc<IntSet>>,
    /// Certified rounding error accumulated below and at this level.
    pub err_cum: u64,
}

impl Level {
    pub fn node(&self, i: u64) -> &IntSet {
        self.nodes.get(&i).map_or(zero_set(), |s| s.as_ref())
    }

    pub fn nontrivial(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub fn total_size(&self) -> u64 {
        self.nodes.values().map(|s| s.len() as u64).sum::<u64>() + (self.len - self.nontrivial())
    }

    pub fn max_sum(&self) -> u64 {
        self.nodes.values().map(|s| s.universe()).sum()
    }

    fn insert(&mut self, i: u64, set: Arc<IntSet>) {
        if !set.is_zero() {
            self.nodes.insert(i, set);
        }
    }

    /// Structural invariants: positions in range, every node holds 0 and fits
    /// below `2^{h+1} E`.
    pub fn check(&self, inv_eps: u64) -> Result<()> {
        let cap = (inv_eps as u128) << (self.height + 1);
        for (&i, s) in &self.nodes {
            if i >= self.len || !s.contains(0) || s.universe() as u128 > cap {
                return Err(Error::ContractBreach(format!("node {i} at height {} is malformed", self.height)));
            }
        }
        Ok(())
    }
}

/// Items of one cell as `(value, item)` pairs sorted by value.
pub type LeafMap = BTreeMap<u64, Vec<(u64, usize)>>;

/// Leaves of repetition `j`: each cell's values plus 0.
pub fn level_zero(family: &PartitionFamily, j: usize, values: &[u64]) -> Result<(Level, LeafMap)> {
    if values.len() != family.items() {
        return Err(Error::Precondition("family and values disagree on the item count".into()));
    }
    let mut leaves: LeafMap = BTreeMap::new();
    for (item, &cell) in family.assignment[j].iter().enumerate() {
        leaves.entry(cell).or_default().push((values[item], item));
    }
    let mut level = Level { height: 0, len: family.params.cells(), nodes: BTreeMap::new(), err_cum: 0 };
    for (&cell, items) in leaves.iter_mut() {
        items.sort_unstable();
        let set: IntSet = std::iter::once(0).chain(items.iter().map(|&(v, _)| v)).collect();
        level.insert(cell, Arc::new(set));
    }
    Ok((level, leaves))
}

/// Drops node values above `top`; nodes left as `{0}` become absent.
pub(crate) fn clip_level(mut level: Level, top: u64) -> Level {
    level.nodes.retain(|_, s| s.universe() <= top || s.floor(top).is_some_and(|x| x > 0));
    for s in level.nodes.values_mut() {
        if s.universe() > top {
            *s = Arc::new(s.window(0, top));
        }
    }
    level
}

/// Rounds every element up to a multiple of `2^{h+1}`, adding
/// `(2^{h+1} - 1) * charged` to the error ledger.
///
/// `charged` is the number of nodes a single witness can draw a nonzero value
/// from at this height.
pub fn round_level(level: &Level, charged: u64) -> Level {
    let g = 1u64 << (level.height + 1);
    let nodes = level
        .nodes
        .iter()
        .map(|(&i, s)| {
            let granular = s.iter().all(|&x| x % g == 0);
            let r = if granular { s.clone() } else { Arc::new(s.iter().map(|&x| x.div_ceil(g) * g).collect()) };
            (i, r)
        })
        .collect();
    Level { height: level.height, len: level.len, nodes, err_cum: level.err_cum + (g - 1) * charged }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    TreeRoot,
    DenseGrid,
}

/// A set approximating the subset sums inside `window` with error `delta_cert`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSet {
    pub elements: IntSet,
    pub window: (u64, u64),
    pub delta_cert: u64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub enum Advance {
    Next(Level),
    Dense(ValueSet),
}

/// Pairs `(i, A_{2i}, A_{2i+1})` where at least one side is nontrivial,
/// scaled down by `2^{h+1}`.
pub(crate) fn scaled_pairs(level: &Level) -> Vec<(u64, IntSet, IntSet)> {
    let g = 1u64 << (level.height + 1);
    let parents: BTreeSet<u64> = level.nodes.keys().map(|&i| i / 2).collect();
    parents
        .into_iter()
        .map(|p| (p, level.node(2 * p).scale_down(g), level.node(2 * p + 1).scale_down(g)))
        .collect()
}

/// Full pairwise sumsets of a rounded level.
pub(crate) fn full_next(
    level: &Level,
    pairs: &[(u64, IntSet, IntSet)],
    computed: &BTreeMap<usize, IntSet>,
    cfg: &SumsetConfig,
) -> Result<Level> {
    let g = 1u64 << (level.height + 1);
    let mut next = Level { height: level.height + 1, len: level.len / 2, nodes: BTreeMap::new(), err_cum: level.err_cum };
    for (k, (p, a, b)) in pairs.iter().enumerate() {
        let (lo, hi) = (level.nodes.get(&(2 * p)), level.nodes.get(&(2 * p + 1)));
        let set = match (lo, hi) {
            (Some(x), None) | (None, Some(x)) => x.clone(),
            _ => {
                let s = match computed.get(&k) {
                    Some(s) => s.clone(),
                    None => sumset(a, b, cfg)?,
                };
                Arc::new(s.scale_up(g))
            }
        };
        next.insert(*p, set);
    }
    Ok(next)
}

/// Density estimate of a rounded level's pairs.
pub(crate) fn level_density(
    pairs: &[(u64, IntSet, IntSet)],
    params: &WindowParams,
) -> Result<crate::density::DensityReport> {
    let borrowed: Vec<(usize, &IntSet, &IntSet)> = pairs.iter().enumerate().map(|(k, (_, a, b))| (k, a, b)).collect();
    estimate_density_pairs(&borrowed, params.gamma, params.density_universe(), params.c)
}

/// Ceiling on a sparse next level's total size.
pub(crate) fn sparse_ceiling(level: &Level, params: &WindowParams) -> u64 {
    sparse_total_size_bound(level.len / 2, 4 * params.gamma, 2 * params.density_universe(), params.c)
}

/// Computes the next level of a rounded level, or the grid if it is dense.
pub fn advance_level(level: &Level, params: &WindowParams) -> Result<Advance> {
    let pairs = scaled_pairs(level);
    let report = level_density(&pairs, params)?;
    if params.allow_dense && report.verdict.is_dense() {
        let (w, v) = params.window();
        let elements = grid_approximation(w, v, 2 * params.beta)?;
        return Ok(Advance::Dense(ValueSet {
            elements,
            window: (w, v),
            delta_cert: level.err_cum + 2 * params.beta,
            provenance: Provenance::DenseGrid,
        }));
    }
    let next = full_next(level, &pairs, &report.computed, &params.sumset)?;
    if matches!(report.verdict, DensityVerdict::Sparse { .. }) {
        let ceiling = sparse_ceiling(level, params);
        if next.total_size() > ceiling {
            return Err(Error::ContractBreach(format!(
                "sparse level of size {} exceeds {ceiling}",
                next.total_size()
            )));
        }
    }
    Ok(Advance::Next(next))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub repetitions: usize,
    pub levels: u32,
    pub largest_level: u64,
    /// `(height, repetition)` of the first dense verdict, if any.
    pub first_dense: Option<(u32, Option<usize>)>,
}

/// How many nodes per level a witness of a kept output can touch.
pub(crate) fn witness_item_cap(n: usize, beta: u64) -> u64 {
    (n as u64).min(4 * beta)
}

/// Union of each repetition's nodes, tagging each value with the first
/// repetition (in the given order) that produced it.
pub(crate) fn unite(levels: &[Level]) -> (Level, BTreeMap<u64, BTreeMap<u64, usize>>) {
    let first = &levels[0];
    let mut united = Level { height: first.height, len: first.len, nodes: BTreeMap::new(), err_cum: 0 };
    let mut provenance: BTreeMap<u64, BTreeMap<u64, usize>> = BTreeMap::new();
    let positions: BTreeSet<u64> = levels.iter().flat_map(|l| l.nodes.keys().copied()).collect();
    for p in positions {
        let tags = provenance.entry(p).or_default();
        for (r, l) in levels.iter().enumerate() {
            for &v in l.node(p).iter() {
                tags.entry(v).or_insert(r);
            }
        }
        let set: IntSet = tags.keys().copied().collect();
        united.insert(p, Arc::new(set));
    }
    united.err_cum = levels.iter().map(|l| l.err_cum).max().unwrap_or(0);
    (united, provenance)
}

/// Restricts a root set to `[w - δ, min(v + δ, 4βE)]`.
pub(crate) fn clip_root(root: &IntSet, params: &WindowParams, delta: u64) -> IntSet {
    let (w, v) = params.window();
    let top = (v + delta).min(params.node_cap());
    root.window(w.saturating_sub(delta), top)
}

/// Value-only pipeline: the first dense verdict anywhere returns the grid.
pub fn run_value_pipeline(values: &[u64], family: &PartitionFamily, params: &WindowParams) -> Result<(ValueSet, PipelineStats)> {
    params.validate()?;
    if family.params != params.cc {
        return Err(Error::Precondition("family was built with different parameters".into()));
    }
    let cap = witness_item_cap(values.len(), params.beta);
    let reps = family.distinct_repetitions();
    let mut stats = PipelineStats { repetitions: reps.len(), ..Default::default() };
    let mut current: Vec<Level> = Vec::with_capacity(reps.len());
    for &j in &reps {
        current.push(level_zero(family, j, values)?.0);
    }
    let hg = params.union_height();
    let root_h = params.root_height();
    for h in 0..root_h {
        if h == hg {
            current = vec![unite(&current).0];
        }
        let charged = charged_nodes(&current, cap);
        let mut next = Vec::with_capacity(current.len());
        for (r, l) in current.iter().enumerate() {
            debug_assert!(l.check(params.inv_eps).is_ok());
            let rounded = clip_level(round_level(l, charged), params.node_cap());
            match advance_level(&rounded, params)? {
                Advance::Next(n) => {
                    stats.largest_level = stats.largest_level.max(n.total_size());
                    next.push(n);
                }
                Advance::Dense(vs) => {
                    stats.first_dense = Some((h, (h < hg).then_some(r)));
                    stats.levels = h;
                    return Ok((vs, stats));
                }
            }
        }
        current = next;
    }
    if hg == root_h {
        current = vec![unite(&current).0];
    }
    stats.levels = root_h;
    let root = &current[0];
    let delta = root.err_cum;
    Ok((
        ValueSet {
            elements: clip_root(root.node(0), params, delta),
            window: params.window(),
            delta_cert: delta,
            provenance: Provenance::TreeRoot,
        },
        stats,
    ))
}

/// Nodes charged for rounding one height: positions nontrivial in any
/// repetition, capped by the witness size bound.
pub(crate) fn charged_nodes(levels: &[Level], cap: u64) -> u64 {
    let positions: BTreeSet<u64> = levels.iter().flat_map(|l| l.nodes.keys().copied()).collect();
    (positions.len() as u64).min(cap)
}

/// Witness pipeline: identical to [`run_value_pipeline`] until a dense
/// verdict, after which levels are computed partially so every output keeps
/// a recoverable witness.
pub fn run_witness_pipeline(values: &[u64], family: &PartitionFamily, params: &WindowParams) -> Result<(ValueSet, TraceTree, PipelineStats)> {
    witness::run(values, family, params)
}
