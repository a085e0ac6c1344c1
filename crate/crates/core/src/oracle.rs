//! Exact reference computations for validation at small scale.

use crate::error::{Error, Result};
use crate::intset::IntSet;

/// Default cap on bitset DP work, in 64-bit word operations.
pub const DEFAULT_BUDGET: u128 = 1 << 32;

/// All subset sums of `values` that do not exceed `limit`, by bitset DP.
pub fn exact_subset_sums(values: &[u64], limit: u64, budget: u128) -> Result<IntSet> {
    let total: u128 = values.iter().map(|&v| v as u128).sum();
    let cap = (limit as u128).min(total) as u64;
    let words = cap as usize / 64 + 1;
    let work = words as u128 * values.len() as u128;
    if work > budget {
        return Err(Error::OverBudget(format!("{work} word operations")));
    }
    let mut bits = vec![0u64; words];
    bits[0] = 1;
    for &v in values {
        if v > cap {
            continue;
        }
        shift_or(&mut bits, v as usize);
    }
    let last = cap as usize % 64;
    if last != 63 {
        bits[words - 1] &= (1u64 << (last + 1)) - 1;
    }
    let mut out = Vec::new();
    for (i, &w) in bits.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(i as u64 * 64 + w.trailing_zeros() as u64);
            w &= w - 1;
        }
    }
    Ok(IntSet::from_sorted(out))
}

/// `bits |= bits << s`, in place.
pub(crate) fn shift_or(bits: &mut [u64], s: usize) {
    let (ws, bs) = (s / 64, s % 64);
    for i in (ws..bits.len()).rev() {
        let mut w = bits[i - ws] << bs;
        if bs != 0 && i > ws {
            w |= bits[i - ws - 1] >> (64 - bs);
        }
        bits[i] |= w;
    }
}

/// Largest subset sum not exceeding `t`.
pub fn best_subset_sum(values: &[u64], t: u64, budget: u128) -> Result<u64> {
    Ok(exact_subset_sums(values, t, budget)?.universe())
}

/// Subset sums by enumerating every subset; for `n <= 24`.
pub fn brute_subset_sums(values: &[u64]) -> Result<IntSet> {
    if values.len() > 24 {
        return Err(Error::OverBudget(format!("{} items for enumeration", values.len())));
    }
    let mut sums = vec![0u64];
    for &v in values {
        let extra: Vec<u64> = sums.iter().map(|&s| s + v).collect();
        sums.extend(extra);
    }
    Ok(IntSet::from_unsorted(sums))
}
