//! From an arbitrary Subset Sum instance down to dyadic windows and back.
//!
//! Units: "scaled" values are `x' = ⌊x E² / t⌋` with `E` the internal
//! `1/ε`, so the scaled target is `E²`. Inside a group with factor `α`,
//! values are `x'' = ⌊x' / α⌋ ∈ [E, 2E]`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::color::{default_q_star, window_color_coding_relaxed};
use crate::density::log2_floor;
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::level::{run_value_pipeline, run_witness_pipeline, WindowParams};
use crate::oracle::{exact_subset_sums, shift_or, DEFAULT_BUDGET};
use crate::sumset::{approx_sumset_many_traced, engine_calls, SumsetConfig};
use crate::witness::TraceTree;

/// Largest internal `1/ε` the driver will use; keeps `E²` and all sums of
/// scaled values far from `u64` overflow.
pub const MAX_INV_EPS: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub items: Vec<u64>,
    pub target: u64,
    pub eps: Ratio<u64>,
}

impl Instance {
    pub fn new(items: Vec<u64>, target: u64, eps: Ratio<u64>) -> Result<Self> {
        let inst = Instance { items, target, eps };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target == 0 {
            return Err(Error::InvalidParameter("target must be positive".into()));
        }
        check_user_eps(self.eps)?;
        if self.items.contains(&0) {
            return Err(Error::InvalidParameter("items must be positive".into()));
        }
        Ok(())
    }

    /// `1/ε` rounded up, i.e. `ε` floored to a unit fraction.
    pub fn inv_eps(&self) -> u64 {
        self.eps.recip().to_integer() + u64::from(!self.eps.recip().is_integer())
    }

    /// `⌊(1+ε) t⌋`.
    pub fn upper(&self) -> u64 {
        let (num, den) = (*self.eps.numer() as u128, *self.eps.denom() as u128);
        ((den + num) * self.target as u128 / den) as u64
    }
}

fn check_user_eps(eps: Ratio<u64>) -> Result<()> {
    if *eps.numer() == 0 || eps.numer() >= eps.denom() {
        return Err(Error::InvalidParameter(format!("epsilon {eps} not in (0, 1)")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Witness,
    ValueOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Overrides the default `8 ⌈log³(1/ε)⌉`.
    pub c_adj: Option<u64>,
    pub max_escalations: u32,
    pub escalation_factor: u64,
    pub density_c: u64,
    /// Overrides the default `(n + 1/ε)^-2`.
    pub q_star: Option<f64>,
    /// How many merged values are backtracked, one per original-unit bucket.
    pub candidates: usize,
    /// Groups are merged at accuracy `1 / min(E, merge_factor / ε)`.
    pub merge_factor: u64,
    pub sumset: SumsetConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Witness,
            c_adj: None,
            max_escalations: 2,
            escalation_factor: 16,
            density_c: 4,
            q_star: None,
            candidates: 64,
            merge_factor: 64,
            sumset: SumsetConfig::default(),
        }
    }
}

/// `8 ⌈log³(1/ε)⌉`, at least 8.
pub fn default_c_adj(inv_eps: u64) -> u64 {
    let l = (inv_eps.max(2) as f64).log2();
    8 * ((l * l * l - 1e-9).ceil() as u64).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trivial {
    /// The whole instance fits: `Y = X` is optimal.
    Exact(Vec<usize>),
    /// A subset with sum in `[t/2, t]`, so `OPT >= t/2`.
    Certificate(Vec<usize>),
}

/// Requires every item to be at most `t`.
pub fn trivial_check(items: &[u64], t: u64) -> Result<Trivial> {
    if let Some(&x) = items.iter().find(|&&x| x > t) {
        return Err(Error::Precondition(format!("item {x} exceeds target {t}")));
    }
    let total: u128 = items.iter().map(|&x| x as u128).sum();
    if total <= t as u128 {
        return Ok(Trivial::Exact((0..items.len()).collect()));
    }
    let mut sum = 0u64;
    let mut taken = Vec::new();
    let mut skipped = None;
    for (i, &x) in items.iter().enumerate() {
        if sum + x <= t {
            sum += x;
            taken.push(i);
        } else if skipped.is_none() && 2 * x as u128 > t as u128 {
            skipped = Some(i);
        }
    }
    if 2 * sum as u128 >= t as u128 {
        return Ok(Trivial::Certificate(taken));
    }
    skipped
        .map(|i| Trivial::Certificate(vec![i]))
        .ok_or_else(|| Error::ContractBreach("greedy found no certificate".into()))
}

/// An item of the reduced instance and the original items it stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedItem {
    pub value: u64,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallItems {
    /// Large items first in input order, then one synthetic item per group.
    pub items: Vec<ReducedItem>,
    /// Original indices of each merged group.
    pub merged: Vec<Vec<usize>>,
    /// Leftover small items that were dropped.
    pub deleted: Vec<usize>,
}

/// Items below `t/E` are packed, in input order, into minimal groups with
/// sum at least `t/E`; the leftover is dropped. `idx` maps positions to the
/// indices recorded in the output.
pub fn preprocess_small_items(items: &[u64], idx: &[usize], t: u64, inv_eps: u64) -> SmallItems {
    let small = |x: u64| (x as u128) * (inv_eps as u128) < t as u128;
    let mut out = SmallItems::default();
    for (&x, &i) in items.iter().zip(idx) {
        if !small(x) {
            out.items.push(ReducedItem { value: x, members: vec![i] });
        }
    }
    let mut group = Vec::new();
    let mut sum = 0u64;
    for (&x, &i) in items.iter().zip(idx) {
        if !small(x) {
            continue;
        }
        group.push(i);
        sum += x;
        if !small(sum) {
            out.items.push(ReducedItem { value: sum, members: group.clone() });
            out.merged.push(std::mem::take(&mut group));
            sum = 0;
        }
    }
    out.deleted = group;
    out
}

/// Items of one `α` class, rescaled into `[E, 2E]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub alpha: u64,
    /// Positions in the reduced item list.
    pub members: Vec<usize>,
    pub values: Vec<u64>,
    /// `⌊E² / α⌋`.
    pub target: u64,
}

/// Scales items in `[t/E, t]` to `[E, E²]` and splits them by `α`.
/// Returns the groups in increasing `α` and the scaled target `E²`.
pub fn scale_and_group(values: &[u64], t: u64, inv_eps: u64) -> Result<(Vec<Group>, u64)> {
    let e = inv_eps as u128;
    let target = e * e;
    if inv_eps == 0 || inv_eps > MAX_INV_EPS {
        return Err(Error::InvalidParameter(format!("1/eps = {inv_eps} out of range")));
    }
    let mut groups: BTreeMap<u64, Group> = BTreeMap::new();
    for (i, &x) in values.iter().enumerate() {
        if x > t || (x as u128) * e < t as u128 {
            return Err(Error::Precondition(format!("item {x} outside [t/E, t]")));
        }
        let scaled = (x as u128 * target / t as u128) as u64;
        let alpha = 1u64 << log2_floor(scaled / inv_eps);
        let g = groups.entry(alpha).or_insert_with(|| Group {
            alpha,
            members: Vec::new(),
            values: Vec::new(),
            target: target as u64 / alpha,
        });
        g.members.push(i);
        g.values.push(scaled / alpha);
    }
    Ok((groups.into_values().collect(), target as u64))
}

/// Powers of two `β` with `β E < t_scaled`; the windows `[βE, 2βE]` together
/// with the base `[0, E]` cover `[0, t_scaled]`.
pub fn dyadic_windows(t_scaled: u64, inv_eps: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut beta = 1u64;
    while (beta as u128) * (inv_eps as u128) < t_scaled as u128 {
        out.push(beta);
        beta *= 2;
    }
    out
}

/// `{Σ - s : s ∈ S}`; elements above `total` are dropped.
pub fn mirror_upper_half(set: &IntSet, total: u64) -> IntSet {
    set.iter().filter(|&&s| s <= total).map(|&s| total - s).collect()
}

/// What the reduction did, enough to map a reduced witness back.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    /// Items larger than `t`.
    pub removed: Vec<usize>,
    pub small: SmallItems,
    pub inv_eps: u64,
    pub groups: Vec<GroupTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTrace {
    pub alpha: u64,
    pub items: usize,
    pub betas: Vec<u64>,
    pub mirrored: bool,
    /// Additive error of the group's set, in group units.
    pub delta: u64,
}

impl ReductionTrace {
    /// Original indices behind reduced items.
    pub fn unwind(&self, reduced: &[usize]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for &r in reduced {
            let item = self
                .small
                .items
                .get(r)
                .ok_or_else(|| Error::Precondition(format!("reduced item {r} does not exist")))?;
            out.extend_from_slice(&item.members);
        }
        out.sort_unstable();
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub inv_eps_internal: u64,
    pub escalations: u32,
    pub groups: usize,
    pub windows: usize,
    pub levels: u64,
    pub dense_fired: bool,
    pub sumset_calls: u64,
    pub candidates_tried: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub value: u64,
    /// Sorted indices into the original items; empty in value-only mode.
    pub witness: Vec<usize>,
    pub target: u64,
    pub eps: Ratio<u64>,
    /// Proven upper bound on `OPT`; the lower guarantee is `(1-ε)` of it.
    pub opt_upper: u64,
    /// `⌊(1+ε) t⌋`.
    pub upper: u64,
    /// Additive error bound of the reduced pipeline, in original units.
    pub delta_cert: u64,
    /// `value >= (1-ε) opt_upper` and `value <= upper`.
    pub certified: bool,
    pub exact: bool,
    pub seed: u64,
    pub mode: Mode,
    pub trace: ReductionTrace,
    pub stats: SolveStats,
}

impl SolveResult {
    /// `(⌈(1-ε) opt_upper⌉, ⌊(1+ε) t⌋)`.
    pub fn guarantee(&self) -> (u64, u64) {
        let (num, den) = (*self.eps.numer() as u128, *self.eps.denom() as u128);
        let lo = ((den - num) * self.opt_upper as u128).div_ceil(den) as u64;
        (lo, self.upper)
    }
}

fn window_seed(seed: u64, attempt: u32, group: usize, beta: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((attempt as u64) << 56) ^ ((group as u64) << 32) ^ beta);
    rng.next_u64()
}

struct WindowRun {
    set: IntSet,
    trace: Option<TraceTree>,
}

struct GroupRun {
    total: u64,
    mirrored: bool,
    base: IntSet,
    windows: Vec<WindowRun>,
    set: IntSet,
    delta: u64,
}

impl GroupRun {
    /// Local item indices realizing `v` up to the group's error.
    fn witness(&self, values: &[u64], v: u64) -> Result<Vec<usize>> {
        if let Some(w) = self.low_witness(values, v)? {
            return Ok(w);
        }
        if self.mirrored && v <= self.total {
            if let Some(w) = self.low_witness(values, self.total - v)? {
                let mut keep = vec![true; values.len()];
                for i in w {
                    keep[i] = false;
                }
                return Ok((0..values.len()).filter(|&i| keep[i]).collect());
            }
        }
        Err(Error::ContractBreach(format!("group value {v} has no source")))
    }

    fn low_witness(&self, values: &[u64], v: u64) -> Result<Option<Vec<usize>>> {
        if self.base.contains(v) {
            return Ok(Some(exact_witness(values, v)?));
        }
        for w in &self.windows {
            if let (true, Some(trace)) = (w.set.contains(v), &w.trace) {
                return Ok(Some(trace.backtrack(v)?));
            }
        }
        Ok(None)
    }
}

/// Items summing to exactly `v`, for `v` in the base window where at most
/// one item fits.
fn exact_witness(values: &[u64], v: u64) -> Result<Vec<usize>> {
    if v == 0 {
        return Ok(Vec::new());
    }
    values
        .iter()
        .position(|&x| x == v)
        .map(|i| vec![i])
        .ok_or_else(|| Error::ContractBreach(format!("base value {v} has no item")))
}

struct Attempt {
    value: u64,
    witness: Vec<usize>,
    opt_upper: u64,
    delta_cert: u64,
    groups: Vec<GroupTrace>,
    windows: usize,
    levels: u64,
    dense_fired: bool,
    candidates_tried: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_group(
    group: &Group,
    gi: usize,
    inv_eps: u64,
    q_star: f64,
    seed: u64,
    attempt: u32,
    cfg: &SolverConfig,
    stats: &mut (usize, u64, bool),
) -> Result<GroupRun> {
    let e = inv_eps;
    let total: u64 = group.values.iter().sum();
    let mirrored = 2 * group.target as u128 > total as u128;
    let tau = if mirrored { total / 2 } else { group.target };
    let base = exact_subset_sums(&group.values, e, DEFAULT_BUDGET)?;
    let mut windows = Vec::new();
    let mut delta = 0;
    let mut low = base.clone();
    let n = group.values.len();
    for beta in dyadic_windows(tau, e) {
        let fam = window_color_coding_relaxed(n, beta, e, q_star, window_seed(seed, attempt, gi, beta))?;
        let mut params = WindowParams::new(e, beta, fam.params, cfg.density_c);
        params.sumset = cfg.sumset;
        params.allow_dense = total as u128 >= 4 * beta as u128 * e as u128;
        let (vs, trace, ps) = match cfg.mode {
            Mode::Witness => {
                let (vs, trace, ps) = run_witness_pipeline(&group.values, &fam, &params)?;
                (vs, Some(trace), ps)
            }
            Mode::ValueOnly => {
                let (vs, ps) = run_value_pipeline(&group.values, &fam, &params)?;
                (vs, None, ps)
            }
        };
        stats.0 += 1;
        stats.1 += ps.levels as u64;
        stats.2 |= ps.first_dense.is_some();
        delta = delta.max(vs.delta_cert);
        low = low.union(&vs.elements);
        windows.push(WindowRun { set: vs.elements, trace });
    }
    let set = if mirrored { low.union(&mirror_upper_half(&low, total)) } else { low };
    Ok(GroupRun { total, mirrored, base, windows, set, delta })
}

/// Word budget for [`exact_small_target`]'s per-item reachability layers.
const EXACT_LAYER_WORDS: u128 = 1 << 23;

/// Best subset with sum at most `t` by bitset DP, when `t` is no larger than
/// the internal scale and the layers fit in memory. Returns local indices.
fn exact_small_target(values: &[u64], t: u64, inv_eps: u64) -> Option<Vec<usize>> {
    let words = t as usize / 64 + 1;
    if t > inv_eps || words as u128 * (values.len() as u128 + 1) > EXACT_LAYER_WORDS {
        return None;
    }
    let mut layers = Vec::with_capacity(values.len() + 1);
    let mut bits = vec![0u64; words];
    bits[0] = 1;
    for &v in values {
        layers.push(bits.clone());
        shift_or(&mut bits, v as usize);
    }
    let get = |b: &[u64], x: u64| b[x as usize / 64] >> (x % 64) & 1 == 1;
    let mut s = (0..=t).rev().find(|&x| get(&bits, x))?;
    let mut out = Vec::new();
    for i in (0..values.len()).rev() {
        if !get(&layers[i], s) {
            out.push(i);
            s -= values[i];
        }
    }
    out.reverse();
    Some(out)
}

/// Merged values to backtrack: the largest one in each original-unit bucket,
/// `count` buckets downward from `scaled_upper` and `count / 4` upward.
fn candidate_order(merged: &IntSet, scaled_upper: u64, t: u64, e2: u128, count: usize) -> Vec<u64> {
    let elems = merged.as_slice();
    let bucket = |v: u64| v as u128 * t as u128 / e2;
    let mut out = Vec::new();
    let mut hi = scaled_upper;
    while out.len() < count {
        let Some(v) = merged.floor(hi) else { break };
        out.push(v);
        // Largest `v'` with `bucket(v') < bucket(v)`.
        let b = bucket(v);
        if b == 0 {
            break;
        }
        hi = ((b * e2).div_ceil(t as u128) - 1) as u64;
    }
    let mut lo = scaled_upper as u128 + 1;
    for _ in 0..count / 4 {
        let i = elems.partition_point(|&e| (e as u128) < lo);
        let Some(&v) = elems.get(i) else { break };
        out.push(v);
        lo = ((bucket(v) + 1) * e2).div_ceil(t as u128);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    reduced: &[ReducedItem],
    t: u64,
    inv_eps: u64,
    merge_inv: u64,
    seed: u64,
    attempt_no: u32,
    cfg: &SolverConfig,
    small_loss: u64,
    original: &[u64],
    upper: u64,
) -> Result<Attempt> {
    let values: Vec<u64> = reduced.iter().map(|r| r.value).collect();
    let (groups, target) = scale_and_group(&values, t, inv_eps)?;
    let q_star = cfg.q_star.unwrap_or_else(|| default_q_star(values.len(), inv_eps));
    let mut counters = (0usize, 0u64, false);
    let mut runs = Vec::with_capacity(groups.len());
    for (gi, g) in groups.iter().enumerate() {
        runs.push(run_group(g, gi, inv_eps, q_star, seed, attempt_no, cfg, &mut counters)?);
    }
    let group_err: u64 = groups.iter().zip(&runs).map(|(g, r)| g.alpha * r.delta).sum();
    let u = target + 2 * group_err + 2 * inv_eps;
    let scaled: Vec<IntSet> = groups.iter().zip(&runs).map(|(g, r)| r.set.scale_up(g.alpha)).collect();
    let tree = approx_sumset_many_traced(&scaled, u, Ratio::new(1, merge_inv))?;
    let delta_s = group_err + tree.error_bound;
    let cap = (target + delta_s).min(u);
    let merged = tree.output.window(0, cap);
    let top = merged.universe();

    // OPT of the reduced instance is within `floor_s` (scaled) of some
    // `V* <= E²` that the merged set sees within `delta_s`.
    let floor_s = 2 * inv_eps;
    let e2 = target as u128;
    let orig = |s: u128| -> u64 { (s * t as u128 / e2) as u64 };
    let opt_upper = (orig((top + delta_s + floor_s) as u128) + small_loss).min(t);
    let delta_cert = ((2 * delta_s + floor_s) as u128 * t as u128).div_ceil(e2) as u64 + small_loss;

    let mut best: (u64, Vec<usize>) = (0, Vec::new());
    let mut tried = 0;
    if cfg.mode == Mode::Witness {
        // `delta_s` is a worst case; real sums track `v` closely, so search
        // downward from the scaled upper bound, then just above it.
        let scaled_upper = ((upper as u128 * e2) / t as u128).min(cap as u128) as u64;
        let order = candidate_order(&merged, scaled_upper, t, e2, cfg.candidates);
        for v in order {
            tried += 1;
            let parts = tree.backtrack(v)?;
            let mut reduced_idx = Vec::new();
            for ((g, r), p) in groups.iter().zip(&runs).zip(parts) {
                for local in r.witness(&g.values, p / g.alpha)? {
                    reduced_idx.push(g.members[local]);
                }
            }
            let mut w: Vec<usize> = reduced_idx.iter().flat_map(|&i| reduced[i].members.iter().copied()).collect();
            w.sort_unstable();
            let sum: u64 = w.iter().map(|&i| original[i]).sum();
            if sum <= upper && sum > best.0 {
                best = (sum, w);
            }
            if best.0 == t {
                break;
            }
        }
    } else {
        best.0 = orig(merged.window(0, target).universe() as u128);
    }
    Ok(Attempt {
        value: best.0,
        witness: best.1,
        opt_upper,
        delta_cert,
        groups: groups
            .iter()
            .zip(&runs)
            .map(|(g, r)| GroupTrace {
                alpha: g.alpha,
                items: g.values.len(),
                betas: dyadic_windows(if r.mirrored { r.total / 2 } else { g.target }, inv_eps),
                mirrored: r.mirrored,
                delta: r.delta,
            })
            .collect(),
        windows: counters.0,
        levels: counters.1,
        dense_fired: counters.2,
        candidates_tried: tried,
    })
}

/// Weak approximation: `Σ(Y) <= (1+ε) t` always, and `Σ(Y) >= (1-ε) OPT`
/// whenever `certified` is set.
pub fn solve_weak_subset_sum(inst: &Instance, seed: u64, cfg: &SolverConfig) -> Result<SolveResult> {
    inst.validate()?;
    cfg.sumset.validate()?;
    if cfg.merge_factor == 0 || cfg.candidates == 0 {
        return Err(Error::InvalidParameter("merge_factor and candidates must be positive".into()));
    }
    let calls_before = engine_calls();
    let t = inst.target;
    let upper = inst.upper();
    let (num, den) = (*inst.eps.numer() as u128, *inst.eps.denom() as u128);
    let mut trace = ReductionTrace::default();
    let mut kept = Vec::new();
    for (i, &x) in inst.items.iter().enumerate() {
        if x > t {
            trace.removed.push(i);
        } else {
            kept.push(i);
        }
    }
    let kept_values: Vec<u64> = kept.iter().map(|&i| inst.items[i]).collect();
    let finish = |value: u64, witness: Vec<usize>, opt_upper: u64, delta_cert: u64, exact: bool, trace, stats| {
        let certified =
            value <= upper && (value as u128) * den >= (den - num) * opt_upper as u128;
        SolveResult {
            value,
            witness,
            target: t,
            eps: inst.eps,
            opt_upper,
            upper,
            delta_cert,
            certified,
            exact,
            seed,
            mode: cfg.mode,
            trace,
            stats,
        }
    };
    let mut stats = SolveStats::default();
    let certificate = match trivial_check(&kept_values, t)? {
        Trivial::Exact(w) => {
            let w: Vec<usize> = w.into_iter().map(|i| kept[i]).collect();
            let value = w.iter().map(|&i| inst.items[i]).sum();
            return Ok(finish(value, w, value, 0, true, trace, stats));
        }
        Trivial::Certificate(w) => w.into_iter().map(|i| kept[i]).collect::<Vec<_>>(),
    };
    if let Some(&i) = kept.iter().find(|&&i| inst.items[i] == t) {
        return Ok(finish(t, vec![i], t, 0, true, trace, stats));
    }
    let cert_value: u64 = certificate.iter().map(|&i| inst.items[i]).sum();

    let base_inv = inst.inv_eps();
    let c_adj = cfg.c_adj.unwrap_or_else(|| default_c_adj(base_inv));
    let mut inv_eps = base_inv.saturating_mul(c_adj).min(MAX_INV_EPS);
    if cfg.mode == Mode::Witness {
        if let Some(w) = exact_small_target(&kept_values, t, inv_eps) {
            let w: Vec<usize> = w.into_iter().map(|i| kept[i]).collect();
            let value = w.iter().map(|&i| inst.items[i]).sum();
            stats.inv_eps_internal = inv_eps;
            return Ok(finish(value, w, value, 0, true, trace, stats));
        }
    }
    let mut result = None;
    for esc in 0..=cfg.max_escalations {
        let small = preprocess_small_items(&kept_values, &kept, t, inv_eps);
        let small_loss = if small.merged.is_empty() && small.deleted.is_empty() {
            0
        } else {
            (2 * t as u128).div_ceil(inv_eps as u128) as u64
        };
        trace.small = small;
        trace.inv_eps = inv_eps;
        let a = if trace.small.items.is_empty() {
            None
        } else {
            let boost = cfg.escalation_factor.saturating_pow(esc);
            let merge_inv = inv_eps.min(base_inv.saturating_mul(cfg.merge_factor).saturating_mul(boost));
            Some(attempt(&trace.small.items, t, inv_eps, merge_inv, seed, esc, cfg, small_loss, &inst.items, upper)?)
        };
        stats.inv_eps_internal = inv_eps;
        stats.escalations = esc;
        let (mut value, mut witness, opt_upper, delta_cert) = match &a {
            Some(a) => {
                stats.groups = a.groups.len();
                stats.windows += a.windows;
                stats.levels += a.levels;
                stats.dense_fired |= a.dense_fired;
                stats.candidates_tried += a.candidates_tried;
                trace.groups = a.groups.clone();
                (a.value, a.witness.clone(), a.opt_upper, a.delta_cert)
            }
            None => (0, Vec::new(), small_loss.min(t), small_loss),
        };
        if cfg.mode == Mode::Witness && cert_value > value {
            value = cert_value;
            witness = certificate.clone();
        }
        let opt_upper = opt_upper.max(value.min(t));
        stats.sumset_calls = engine_calls() - calls_before;
        let r = finish(value, witness, opt_upper, delta_cert, false, trace.clone(), stats.clone());
        let certified = r.certified;
        result = Some(r);
        if certified || esc == cfg.max_escalations {
            break;
        }
        // Another round only helps if the shortfall can close at the larger scale.
        let needed = (opt_upper as u128) * num;
        let loss = ((opt_upper - value.min(opt_upper)) as u128) * den;
        let next = inv_eps.saturating_mul(cfg.escalation_factor);
        if next > MAX_INV_EPS || loss > needed * (cfg.escalation_factor as u128).pow(cfg.max_escalations - esc) {
            break;
        }
        inv_eps = next;
    }
    Ok(result.expect("at least one attempt runs"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionResult {
    /// The side with sum at most `⌊Σ/2⌋`.
    pub side: SolveResult,
    pub other: Vec<usize>,
}

/// Strong approximation for Partition: the reported side never exceeds
/// `⌊Σ/2⌋`, since an overshooting weak answer is replaced by its complement.
pub fn solve_partition(items: &[u64], eps: Ratio<u64>, seed: u64, cfg: &SolverConfig) -> Result<PartitionResult> {
    if items.is_empty() {
        return Err(Error::EmptySet("partition instance"));
    }
    check_user_eps(eps)?;
    let total: u128 = items.iter().map(|&x| x as u128).sum();
    let t = u64::try_from(total / 2).map_err(|_| Error::InvalidParameter("sum exceeds 64 bits".into()))?;
    let all: Vec<usize> = (0..items.len()).collect();
    if t == 0 {
        let side = SolveResult {
            value: 0,
            witness: Vec::new(),
            target: 0,
            eps,
            opt_upper: 0,
            upper: 0,
            delta_cert: 0,
            certified: true,
            exact: true,
            seed,
            mode: cfg.mode,
            trace: ReductionTrace::default(),
            stats: SolveStats::default(),
        };
        return Ok(PartitionResult { side, other: all });
    }
    let inst = Instance::new(items.to_vec(), t, eps)?;
    let mut side = solve_weak_subset_sum(&inst, seed, cfg)?;
    if side.value > t && cfg.mode == Mode::Witness {
        let mut keep = vec![true; items.len()];
        for &i in &side.witness {
            keep[i] = false;
        }
        side.witness = all.iter().copied().filter(|&i| keep[i]).collect();
        side.value = (total - side.value as u128) as u64;
        side.upper = t;
        let (num, den) = (*eps.numer() as u128, *eps.denom() as u128);
        side.certified = side.certified && (side.value as u128) * den >= (den - num) * side.opt_upper as u128;
    } else {
        side.value = side.value.min(t);
    }
    let mut in_side = vec![false; items.len()];
    for &i in &side.witness {
        in_side[i] = true;
    }
    let other = all.into_iter().filter(|&i| !in_side[i]).collect();
    Ok(PartitionResult { side, other })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn exact_small_target_reconstructs() {
        let values = [828, 474, 474, 263, 637, 950, 263];
        let w = exact_small_target(&values, 2000, 4096).unwrap();
        let best = crate::oracle::best_subset_sum(&values, 2000, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.iter().map(|&i| values[i]).sum::<u64>(), best);
        assert!(w.windows(2).all(|p| p[0] < p[1]));
        let w = exact_small_target(&[5, 9], 13, 64).unwrap();
        assert_eq!(w, vec![1]);
        assert!(exact_small_target(&values, 5000, 4096).is_none());
    }

    #[test]
    fn trivial_examples() {
        assert_eq!(trivial_check(&[6], 10).unwrap(), Trivial::Exact(vec![0]));
        assert_eq!(trivial_check(&[7, 7], 10).unwrap(), Trivial::Certificate(vec![0]));
        assert_eq!(trivial_check(&[], 5).unwrap(), Trivial::Exact(vec![]));
        assert_eq!(trivial_check(&[2, 9], 10).unwrap(), Trivial::Certificate(vec![1]));
    }

    #[test]
    fn small_items_grouping() {
        let out = preprocess_small_items(&[4, 4, 4], &[0, 1, 2], 100, 10);
        assert_eq!(out.merged, vec![vec![0, 1, 2]]);
        assert_eq!(out.items, vec![ReducedItem { value: 12, members: vec![0, 1, 2] }]);
        let out = preprocess_small_items(&[50, 3, 3], &[0, 1, 2], 100, 10);
        assert_eq!(out.deleted, vec![1, 2]);
        assert_eq!(out.items.len(), 1);
    }

    #[test]
    fn scaling_examples() {
        let (groups, target) = scale_and_group(&[100, 199], 1000, 10).unwrap();
        assert_eq!(target, 100);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].alpha, 1);
        assert_eq!(groups[0].values, vec![10, 19]);
        assert_eq!(groups[0].target, 100);
    }

    #[test]
    fn window_examples() {
        assert_eq!(dyadic_windows(40, 10), vec![1, 2]);
        assert!(dyadic_windows(10, 10).is_empty());
    }

    #[test]
    fn mirror_is_an_involution() {
        let s = IntSet::from([0, 3, 7]);
        assert_eq!(mirror_upper_half(&mirror_upper_half(&s, 10), 10), s);
        assert!(mirror_upper_half(&s, 10).contains(10));
    }

    #[test]
    fn solve_examples() {
        let inst = Instance::new(vec![3, 5, 8], 10, eps(1, 4)).unwrap();
        let r = solve_weak_subset_sum(&inst, 1, &SolverConfig::default()).unwrap();
        assert!((6..=12).contains(&r.value), "{r:?}");
        assert_eq!(r.value, r.witness.iter().map(|&i| inst.items[i]).sum::<u64>());
        let p = solve_partition(&[1, 2, 3, 4], eps(1, 10), 1, &SolverConfig::default()).unwrap();
        assert_eq!(p.side.value, 5);
        let p = solve_partition(&[1], eps(1, 2), 1, &SolverConfig::default()).unwrap();
        assert!(p.side.witness.is_empty());
        assert_eq!(p.other, vec![0]);
    }
}
