//! Sumset primitives.
//!
//! `dense_sumset` convolves indicator vectors over the whole universe.
//! `sparse_sumset` is output-sensitive: it hashes both sets modulo a random
//! prime `p` of order `|A + B|` and recovers every sum from three moment
//! convolutions (pair count, sum of quotients, sum of squared quotients). A
//! bucket whose pairs all share one sum satisfies Cauchy-Schwarz with
//! equality, which identifies the sum exactly. Rounds repeat with fresh primes
//! until the recovered multiplicities account for all `|A| * |B|` pairs, so the
//! output is always exact (Las Vegas).

use std::cell::Cell;
use std::collections::HashMap;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::ntt;

thread_local! {
    static ENGINE_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of exact sumset evaluations performed on this thread.
pub fn engine_calls() -> u64 {
    ENGINE_CALLS.with(|c| c.get())
}

fn bump_calls() {
    ENGINE_CALLS.with(|c| c.set(c.get() + 1));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    Dense,
    Sparse,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetConfig {
    pub engine: Engine,
    /// `Auto` runs the dense engine when `universe <= auto_threshold * estimate`.
    pub auto_threshold: u64,
}

impl Default for SumsetConfig {
    fn default() -> Self {
        SumsetConfig { engine: Engine::Auto, auto_threshold: 8 }
    }
}

impl SumsetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.auto_threshold == 0 {
            return Err(Error::InvalidParameter("auto_threshold must be positive".into()));
        }
        Ok(())
    }
}

fn check_nonempty(a: &IntSet, b: &IntSet, op: &'static str) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet(op));
    }
    Ok(())
}

/// Exact `A + B` by convolving indicator vectors over `[0, max A + max B]`.
pub fn dense_sumset(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    check_nonempty(a, b, "dense_sumset")?;
    bump_calls();
    Ok(dense_unchecked(a, b))
}

fn dense_unchecked(a: &IntSet, b: &IntSet) -> IntSet {
    let ua = a.universe() as usize;
    let ub = b.universe() as usize;
    let len = (ua + ub + 1).next_power_of_two() as u128;
    let shift_or_work = a.len().min(b.len()) as u128 * (ua.max(ub) as u128 / 64 + 1);
    let transform_work = 6 * len * (len.trailing_zeros() as u128 + 1);
    if ua + ub < ntt::MAX_LEN && transform_work < shift_or_work {
        let mut ia = vec![0u64; ua + 1];
        let mut ib = vec![0u64; ub + 1];
        for &x in a.iter() {
            ia[x as usize] = 1;
        }
        for &x in b.iter() {
            ib[x as usize] = 1;
        }
        let c = ntt::convolve_counts(&ia, &ib);
        let out = c.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i as u64).collect();
        IntSet::from_sorted(out)
    } else {
        bitset_sumset(a, b)
    }
}

/// Shift-or over a word bitset; used when the smaller set is short or the
/// universe exceeds the NTT limit.
fn bitset_sumset(a: &IntSet, b: &IntSet) -> IntSet {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let u = (a.universe() + b.universe()) as usize;
    let words = u / 64 + 1;
    let lw = large.universe() as usize / 64 + 1;
    let mut src = vec![0u64; lw];
    for &x in large.iter() {
        src[x as usize / 64] |= 1 << (x % 64);
    }
    let mut out = vec![0u64; words + 1];
    for &s in small.iter() {
        let (ws, bs) = (s as usize / 64, (s % 64) as u32);
        let dst = &mut out[ws..ws + lw + 1];
        if bs == 0 {
            dst.iter_mut().zip(&src).for_each(|(d, &w)| *d |= w);
            continue;
        }
        dst[0] |= src[0] << bs;
        for (d, (&w, &prev)) in dst[1..lw].iter_mut().zip(src[1..].iter().zip(&src[..lw - 1])) {
            *d |= (w << bs) | (prev >> (64 - bs));
        }
        dst[lw] |= src[lw - 1] >> (64 - bs);
    }
    let mut v = Vec::new();
    for (i, &w) in out.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let t = w.trailing_zeros() as u64;
            v.push(i as u64 * 64 + t);
            w &= w - 1;
        }
    }
    v.retain(|&x| x <= u as u64);
    IntSet::from_sorted(v)
}

const SPARSE_SEED: u64 = 0x5eed_c0ff_ee00_0001;

/// Exact `A + B` in time governed by `|A + B|` rather than the universe.
pub fn sparse_sumset(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(SPARSE_SEED ^ (a.len() as u64) << 32 ^ b.len() as u64);
    sparse_sumset_with_rng(a, b, &mut rng)
}

pub fn sparse_sumset_with_rng<R: Rng>(a: &IntSet, b: &IntSet, rng: &mut R) -> Result<IntSet> {
    check_nonempty(a, b, "sparse_sumset")?;
    bump_calls();
    Ok(sparse_unchecked(a, b, rng))
}

fn sparse_unchecked<R: Rng>(a: &IntSet, b: &IntSet, rng: &mut R) -> IntSet {
    let (na, nb) = (a.len() as u64, b.len() as u64);
    if na == 1 {
        return b.shift(a[0]);
    }
    if nb == 1 {
        return a.shift(b[0]);
    }
    // |A + B| >= |A| + |B| - 1, so enumeration is within a constant of output size.
    if na * nb <= (32 * (na + nb)).max(PAIRWISE_LIMIT) {
        return pairwise(a, b);
    }
    let u = a.universe() + b.universe();
    if u < 4 * na.max(nb) {
        return dense_unchecked(a, b);
    }
    hashed_sumset(a, b, rng)
}

/// Below this many pairs, enumeration beats any transform.
const PAIRWISE_LIMIT: u64 = 1 << 14;

fn pairwise(a: &IntSet, b: &IntSet) -> IntSet {
    let mut v = Vec::with_capacity(a.len() * b.len());
    for &x in a.iter() {
        v.extend(b.iter().map(|&y| x + y));
    }
    IntSet::from_unsorted(v)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn random_prime<R: Rng>(lo: u64, rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range(lo..=2 * lo);
        if is_prime(c) {
            return c;
        }
    }
}

/// Largest modulus the moment convolutions may use (`2p - 1 <= MAX_LEN`).
const MAX_MODULUS: u64 = (ntt::MAX_LEN / 2) as u64;

fn hashed_sumset<R: Rng>(a: &IntSet, b: &IntSet, rng: &mut R) -> IntSet {
    let total_pairs = a.len() as u128 * b.len() as u128;
    let vmax = a.universe().max(b.universe());
    // Moment coefficients are at most pairs * (2 * qmax)^2; keep them below 2^85.
    let mut min_p = 17u64;
    loop {
        let qmax = vmax / min_p + 1;
        let q2 = (qmax as u128) * (qmax as u128);
        let widest = a.len().max(b.len()) as u128;
        if total_pairs * 4 * q2 < (1u128 << 85) && widest * q2 < (1u128 << 63) {
            break;
        }
        min_p *= 2;
    }
    assert!(min_p <= MAX_MODULUS / 2, "values too large for the moment convolutions");
    let mut found: HashMap<u64, u128> = HashMap::new();
    let mut accounted: u128 = 0;
    let mut est = a.len().max(b.len()) as u64;
    loop {
        let lo = (4 * est.min(total_pairs as u64)).max(min_p).min(MAX_MODULUS / 2);
        let p = random_prime(lo, rng);
        let unresolved = hashed_round(a, b, p, &mut found, &mut accounted);
        if accounted == total_pairs {
            break;
        }
        debug_assert!(!unresolved.is_empty());
        let shorter = a.len().min(b.len()) as u128;
        if shorter * unresolved.len() as u128 <= 16 * p as u128 {
            return resolve_buckets(a, b, p, &unresolved, found.into_keys().collect());
        }
        est = (2 * est).max(found.len() as u64 + 2 * unresolved.len() as u64);
        // Enumerating every pair is now within a constant of the output size.
        if total_pairs <= 64 * est as u128 {
            return pairwise(a, b);
        }
    }
    IntSet::from_unsorted(found.into_keys().collect())
}

/// Completes `known` with every sum landing in one of `buckets`, where a sum
/// `x + y` lands in bucket `(x mod p) + (y mod p)`.
fn resolve_buckets(a: &IntSet, b: &IntSet, p: u64, buckets: &[u64], mut known: Vec<u64>) -> IntSet {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut by_residue: HashMap<u64, Vec<u64>> = HashMap::new();
    for &y in long.iter() {
        by_residue.entry(y % p).or_default().push(y);
    }
    for &t in buckets {
        for &x in short.iter() {
            let r = x % p;
            if r > t || t - r >= p {
                continue;
            }
            if let Some(ys) = by_residue.get(&(t - r)) {
                known.extend(ys.iter().map(|&y| x + y));
            }
        }
    }
    IntSet::from_unsorted(known)
}

/// One hashing round; returns the buckets holding two or more distinct sums.
fn hashed_round(
    a: &IntSet,
    b: &IntSet,
    p: u64,
    found: &mut HashMap<u64, u128>,
    accounted: &mut u128,
) -> Vec<u64> {
    let n = p as usize;
    let moments = |s: &IntSet| {
        let (mut cnt, mut q1, mut q2) = (vec![0u64; n], vec![0u64; n], vec![0u64; n]);
        for &x in s.iter() {
            let (q, r) = (x / p, (x % p) as usize);
            cnt[r] += 1;
            q1[r] += q;
            q2[r] += q * q;
        }
        (cnt, q1, q2)
    };
    let (ca, qa1, qa2) = moments(a);
    let (cb, qb1, qb2) = moments(b);
    let [count, s1, s2] = ntt::moment_convolutions(
        &ntt::Moments { count: &ca, first: &qa1, second: &qa2 },
        &ntt::Moments { count: &cb, first: &qb1, second: &qb2 },
    );
    // A sum can straddle buckets `t` and `t + p`, so multiplicities are
    // gathered per round and merged by maximum.
    let mut round: HashMap<u64, u128> = HashMap::new();
    let mut unresolved = Vec::new();
    for t in 0..count.len() {
        let c = count[t];
        if c == 0 {
            continue;
        }
        // All quotients in the bucket agree iff N * sum(q^2) == (sum q)^2.
        if c * s2[t] == s1[t] * s1[t] {
            debug_assert_eq!(s1[t] % c, 0);
            let q = (s1[t] / c) as u64;
            let value = t as u64 + p * q;
            *round.entry(value).or_default() += c;
        } else {
            unresolved.push(t as u64);
        }
    }
    for (value, c) in round {
        let seen = found.entry(value).or_default();
        if c > *seen {
            *accounted += c - *seen;
            *seen = c;
        }
    }
    unresolved
}

/// Beyond the NTT length, `Auto` still takes the shift-or path when it costs at
/// most this many word operations per expected output element.
const SHIFT_OR_PER_OUTPUT: u128 = 256;
const MAX_SHIFT_OR_BITS: u128 = 1 << 31;

/// `A + B` through the engine selected by `cfg`.
pub fn sumset(a: &IntSet, b: &IntSet, cfg: &SumsetConfig) -> Result<IntSet> {
    check_nonempty(a, b, "sumset")?;
    match cfg.engine {
        Engine::Dense => dense_sumset(a, b),
        Engine::Sparse => sparse_sumset(a, b),
        Engine::Auto => {
            let estimate = (a.len() as u128 * b.len() as u128).min((a.universe() + b.universe()) as u128 + 1);
            let universe = (a.universe() + b.universe()) as u128;
            let fits = universe < ntt::MAX_LEN as u128
                || (universe <= MAX_SHIFT_OR_BITS
                    && a.len().min(b.len()) as u128 * (universe / 64 + 1) <= SHIFT_OR_PER_OUTPUT * estimate);
            if universe <= cfg.auto_threshold as u128 * estimate && fits {
                dense_sumset(a, b)
            } else {
                sparse_sumset(a, b)
            }
        }
    }
}

/// `{z mod tau : z in Z}`.
pub fn mod_reduce(z: &IntSet, tau: u64) -> Result<IntSet> {
    if tau == 0 {
        return Err(Error::InvalidParameter("modulus must be at least 1".into()));
    }
    Ok(z.iter().map(|&x| x % tau).collect())
}

/// Outcome of a sumset size threshold query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeTest {
    pub at_least: bool,
    /// `A + B`, when the query ended by computing it in full.
    pub sumset: Option<IntSet>,
    /// Modular rounds performed.
    pub rounds: u32,
}

/// Decides whether `|A + B| >= k` without computing large sumsets.
///
/// Folds both sets modulo `2^j` for growing `j`. A folded sumset of size at
/// least `2k` certifies the answer since `|(A mod τ) + (B mod τ)| <= 2|A + B|`;
/// once `2^j` exceeds every element the fold is the sumset itself.
pub fn sumset_size_at_least(a: &IntSet, b: &IntSet, k: u64) -> Result<SizeTest> {
    check_nonempty(a, b, "sumset_size_at_least")?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let (na, nb) = (a.len() as u64, b.len() as u64);
    if na.max(nb) >= k || na + nb > k {
        return Ok(SizeTest { at_least: true, sumset: None, rounds: 0 });
    }
    if (na as u128) * (nb as u128) < k as u128 {
        return Ok(SizeTest { at_least: false, sumset: None, rounds: 0 });
    }
    if (na as u128) * (nb as u128) <= PAIRWISE_LIMIT as u128 {
        let s = pairwise(a, b);
        return Ok(SizeTest { at_least: s.len() as u64 >= k, sumset: Some(s), rounds: 1 });
    }
    // Folds live below `2^j`, where the dense engine is cheapest.
    let auto = SumsetConfig::default();
    let top = a.universe().max(b.universe());
    let mut rounds = 0;
    // A fold modulo `2^j` has at most `2^j` elements, so smaller `j` cannot certify.
    let mut j = (2 * k as u128).next_power_of_two().trailing_zeros().max(1);
    loop {
        rounds += 1;
        if j >= 64 || (1u64 << j) > top {
            let s = sumset(a, b, &auto)?;
            return Ok(SizeTest { at_least: s.len() as u64 >= k, sumset: Some(s), rounds });
        }
        let tau = 1u64 << j;
        let folded = sumset(&mod_reduce(a, tau)?, &mod_reduce(b, tau)?, &auto)?;
        if folded.len() as u64 >= 2 * k {
            return Ok(SizeTest { at_least: true, sumset: None, rounds });
        }
        j += 1;
    }
}

fn check_eps(eps: Ratio<u64>) -> Result<()> {
    if *eps.numer() == 0 || eps >= Ratio::from_integer(1) {
        return Err(Error::InvalidParameter(format!("accuracy {eps} must lie in (0, 1)")));
    }
    Ok(())
}

/// Rounding granularity `⌊ε u / (2 parts)⌋`, at least 1.
fn rounding_step(u: u64, eps: Ratio<u64>, parts: u64) -> u64 {
    let num = *eps.numer() as u128 * u as u128;
    let den = 2 * *eps.denom() as u128 * parts as u128;
    ((num / den) as u64).max(1)
}

fn round_down(s: &IntSet, step: u64, u: u64) -> IntSet {
    s.iter().take_while(|&&x| x <= u).map(|&x| x / step).collect()
}

/// Approximates `(A + B)[0, u]` with additive error `ε u` using at most
/// `4/ε + 1` elements. Inputs are rounded down to multiples of `⌊ε u / 2⌋`.
pub fn approx_sumset_pair(a: &IntSet, b: &IntSet, u: u64, eps: Ratio<u64>) -> Result<IntSet> {
    check_nonempty(a, b, "approx_sumset_pair")?;
    check_eps(eps)?;
    if u == 0 {
        return Err(Error::InvalidParameter("u must be positive".into()));
    }
    let step = rounding_step(u, eps, 1);
    let (ra, rb) = (round_down(a, step, u), round_down(b, step, u));
    if ra.is_empty() || rb.is_empty() {
        return Err(Error::Precondition("inputs must contain an element of [0, u]".into()));
    }
    let s = dense_sumset(&ra, &rb)?;
    Ok(s.iter().map(|&x| x * step).take_while(|&x| x <= u).collect())
}

/// Record of a many-way merge, kept so a root value can be split back into
/// one original element per input set.
#[derive(Debug, Clone)]
pub struct MergeTree {
    step: u64,
    /// `levels[0]` holds the rounded leaves (in units of `step`).
    levels: Vec<Vec<IntSet>>,
    leaves: Vec<IntSet>,
    /// The approximation returned to the caller.
    pub output: IntSet,
    /// Certified two-sided additive error of `output`.
    pub error_bound: u64,
}

impl MergeTree {
    /// Splits `value` (an element of `output` or of the unthinned root) into
    /// one element per input set whose exact sum lies in `[value, value + error_bound]`.
    pub fn backtrack(&self, value: u64) -> Result<Vec<u64>> {
        if !value.is_multiple_of(self.step) {
            return Err(Error::Precondition(format!("{value} is not a merge output")));
        }
        let top = self.levels.len() - 1;
        if !self.levels[top][0].contains(value / self.step) {
            return Err(Error::Precondition(format!("{value} is not a merge output")));
        }
        let mut targets = vec![value / self.step];
        for h in (0..top).rev() {
            let nodes = &self.levels[h];
            let mut next = Vec::with_capacity(nodes.len());
            for (i, &y) in targets.iter().enumerate() {
                let (l, r) = (2 * i, 2 * i + 1);
                if r >= nodes.len() {
                    next.push(y);
                    continue;
                }
                let (left, right) = (&nodes[l], &nodes[r]);
                let a = left
                    .iter()
                    .copied()
                    .find(|&a| a <= y && right.contains(y - a))
                    .ok_or_else(|| Error::ContractBreach(format!("no split of {y} at height {h}")))?;
                next.push(a);
                next.push(y - a);
            }
            targets = next;
        }
        targets
            .iter()
            .zip(&self.leaves)
            .map(|(&q, leaf)| {
                let lo = q * self.step;
                leaf.window(lo, lo + self.step - 1)
                    .first()
                    .copied()
                    .ok_or_else(|| Error::ContractBreach(format!("rounded leaf value {lo} has no preimage")))
            })
            .collect()
    }
}

/// Approximates `(A_1 + ... + A_ℓ)[0, u]` with additive error `ε u`.
///
/// Pairs are merged bottom-up with per-node accuracy `ε/ℓ`; every node shares
/// one rounding step, so only the leaves are actually rounded. For `ℓ >= 3`
/// the root is thinned to gaps of `⌊ε u / 2⌋`, which keeps the output at most
/// `2/ε + 1` elements. In all cases `|output| <= 9/ε`.
pub fn approx_sumset_many(sets: &[IntSet], u: u64, eps: Ratio<u64>) -> Result<IntSet> {
    Ok(approx_sumset_many_traced(sets, u, eps)?.output)
}

pub fn approx_sumset_many_traced(sets: &[IntSet], u: u64, eps: Ratio<u64>) -> Result<MergeTree> {
    if sets.is_empty() {
        return Err(Error::EmptySet("approx_sumset_many"));
    }
    if sets.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySet("approx_sumset_many"));
    }
    check_eps(eps)?;
    if u == 0 {
        return Err(Error::InvalidParameter("u must be positive".into()));
    }
    let ell = sets.len() as u64;
    let step = rounding_step(u, eps, ell);
    let cap = u / step;
    let mut level: Vec<IntSet> = Vec::with_capacity(sets.len());
    for s in sets {
        let r = round_down(s, step, u);
        if r.is_empty() {
            return Err(Error::Precondition("every set must contain an element of [0, u]".into()));
        }
        level.push(r);
    }
    let mut levels = vec![level];
    while levels.last().unwrap().len() > 1 {
        let cur = levels.last().unwrap();
        let mut next = Vec::with_capacity(cur.len().div_ceil(2));
        for pair in cur.chunks(2) {
            if pair.len() == 1 {
                next.push(pair[0].clone());
            } else {
                next.push(dense_sumset(&pair[0], &pair[1])?.window(0, cap));
            }
        }
        levels.push(next);
    }
    let root = &levels.last().unwrap()[0];
    let mut error_bound = ell * (step - 1);
    let output: IntSet = if ell >= 3 {
        let gap = rounding_step(u, eps, 1);
        error_bound += gap - 1;
        thin(root, gap, step)
    } else {
        root.iter().map(|&x| x * step).collect()
    };
    Ok(MergeTree { step, levels, leaves: sets.to_vec(), output, error_bound })
}

/// Keeps the smallest element and then every element at least `gap` above the
/// last kept one; inputs are in units of `step`.
fn thin(root: &IntSet, gap: u64, step: u64) -> IntSet {
    let mut out = Vec::new();
    let mut last: Option<u64> = None;
    for &q in root.iter() {
        let x = q * step;
        if last.is_none_or(|l| x >= l + gap) {
            out.push(x);
            last = Some(x);
        }
    }
    IntSet::from_sorted(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &IntSet, b: &IntSet) -> IntSet {
        pairwise(a, b)
    }

    #[test]
    fn dense_small_cases() {
        let s = dense_sumset(&IntSet::from([0, 1]), &IntSet::from([0, 2])).unwrap();
        assert_eq!(s.as_slice(), &[0, 1, 2, 3]);
        let a = IntSet::from([3, 7, 8]);
        assert_eq!(dense_sumset(&a, &IntSet::zero()).unwrap(), a);
        assert!(dense_sumset(&IntSet::new(), &a).is_err());
    }

    #[test]
    fn sparse_handles_huge_universe() {
        let a = IntSet::from([0, 1_000_000]);
        let s = sparse_sumset(&a, &a).unwrap();
        assert_eq!(s.as_slice(), &[0, 1_000_000, 2_000_000]);
    }

    #[test]
    fn hashed_rounds_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..12 {
            let na = rng.gen_range(20..120);
            let nb = rng.gen_range(20..120);
            let span = rng.gen_range(1u64..1 << 30);
            let a: IntSet = (0..na).map(|_| rng.gen_range(0..=span)).collect();
            let b: IntSet = (0..nb).map(|_| rng.gen_range(0..=span)).collect();
            assert_eq!(hashed_sumset(&a, &b, &mut rng), naive(&a, &b));
        }
    }

    #[test]
    fn bitset_fallback_matches() {
        let a = IntSet::from([0, 5, 64, 1000, 4095]);
        let b = IntSet::from([1, 63, 129]);
        assert_eq!(bitset_sumset(&a, &b), naive(&a, &b));
    }

    #[test]
    fn size_threshold_examples() {
        let a = IntSet::interval(0, 9);
        assert!(sumset_size_at_least(&a, &a, 19).unwrap().at_least);
        assert!(!sumset_size_at_least(&a, &a, 20).unwrap().at_least);
        assert!(sumset_size_at_least(&IntSet::zero(), &IntSet::zero(), 1).unwrap().at_least);
    }

    #[test]
    fn mod_reduce_examples() {
        assert_eq!(mod_reduce(&IntSet::from([3, 5, 9]), 4).unwrap().as_slice(), &[1, 3]);
        assert_eq!(mod_reduce(&IntSet::from([0, 7, 14]), 7).unwrap().as_slice(), &[0]);
        assert!(mod_reduce(&IntSet::zero(), 0).is_err());
    }

    #[test]
    fn approx_pair_rounds_down() {
        let s = approx_sumset_pair(&IntSet::from([0, 3]), &IntSet::from([0, 5]), 8, Ratio::new(1, 2)).unwrap();
        assert_eq!(s.as_slice(), &[0, 2, 4, 6]);
    }

    #[test]
    fn approx_many_degenerate_shapes() {
        let a = IntSet::from([0, 3, 9, 17]);
        let b = IntSet::from([0, 5, 11]);
        let eps = Ratio::new(1, 4);
        let one = approx_sumset_many(std::slice::from_ref(&a), 40, eps).unwrap();
        assert_eq!(one.as_slice(), &[0, 5, 15]);
        let two = approx_sumset_many(&[a.clone(), b.clone()], 40, eps).unwrap();
        assert_eq!(two, approx_sumset_pair(&a, &b, 40, eps / 2).unwrap());
    }

    #[test]
    fn merge_tree_backtracks_to_members() {
        let sets = vec![IntSet::from([0, 4, 9]), IntSet::from([0, 7]), IntSet::from([0, 2, 13]), IntSet::from([0, 30])];
        let tree = approx_sumset_many_traced(&sets, 64, Ratio::new(1, 4)).unwrap();
        for &v in tree.output.iter() {
            let parts = tree.backtrack(v).unwrap();
            assert_eq!(parts.len(), sets.len());
            for (p, s) in parts.iter().zip(&sets) {
                assert!(s.contains(*p));
            }
            let total: u64 = parts.iter().sum();
            assert!(total >= v && total <= v + tree.error_bound);
        }
    }
}
