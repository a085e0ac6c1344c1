//! Checking the two-sided additive approximation contract.

use crate::intset::IntSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// A true sum inside the window has no approximation within `delta`.
    Uncovered(u64),
    /// An approximation has no true sum within `delta`.
    Unsupported(u64),
}

/// Whether `approx` approximates `exact[w, v]` with additive error `delta`:
/// every `s` in `exact[w, v]` has some element of `approx` in `[s - δ, s + δ]`,
/// and every element of `approx` has some `s` in `exact` within `δ`.
pub fn check_approximation(approx: &IntSet, exact: &IntSet, w: u64, v: u64, delta: u64) -> Result<(), Violation> {
    for &s in exact.window(w, v).iter() {
        if !near(approx, s, delta) {
            return Err(Violation::Uncovered(s));
        }
    }
    for &a in approx.iter() {
        if !near(exact, a, delta) {
            return Err(Violation::Unsupported(a));
        }
    }
    Ok(())
}

fn near(set: &IntSet, x: u64, delta: u64) -> bool {
    !set.window(x.saturating_sub(delta), x.saturating_add(delta)).is_empty()
}

/// Smallest `δ` for which [`check_approximation`] passes.
pub fn approximation_error(approx: &IntSet, exact: &IntSet, w: u64, v: u64) -> Option<u64> {
    let dist = |set: &IntSet, x: u64| -> Option<u64> {
        let below = set.floor(x).map(|y| x - y);
        let above = set.window(x, u64::MAX).first().map(|&y| y - x);
        match (below, above) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    };
    let mut worst = 0;
    for &s in exact.window(w, v).iter() {
        worst = worst.max(dist(approx, s)?);
    }
    for &a in approx.iter() {
        worst = worst.max(dist(exact, a)?);
    }
    Some(worst)
}
