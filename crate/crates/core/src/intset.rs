//! Sorted sets of non-negative integers.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// A strictly increasing list of non-negative integers.
///
/// The universe bound is the largest element (or 0 for the empty set); all
/// elements therefore lie in `[0, universe()]`.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntSet {
    elems: Vec<u64>,
}

impl IntSet {
    pub fn new() -> Self {
        IntSet { elems: Vec::new() }
    }

    /// The set `{0}`.
    pub fn zero() -> Self {
        IntSet { elems: vec![0] }
    }

    /// Builds a set from arbitrary values, sorting and removing duplicates.
    pub fn from_unsorted(mut v: Vec<u64>) -> Self {
        v.sort_unstable();
        v.dedup();
        IntSet { elems: v }
    }

    /// Wraps an already strictly increasing vector.
    ///
    /// Panics in debug builds if the input is not strictly increasing.
    pub fn from_sorted(v: Vec<u64>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]), "input not strictly increasing");
        IntSet { elems: v }
    }

    pub fn interval(lo: u64, hi: u64) -> Self {
        IntSet { elems: (lo..=hi).collect() }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.elems
    }

    pub fn min(&self) -> Option<u64> {
        self.elems.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elems.last().copied()
    }

    pub fn universe(&self) -> u64 {
        self.max().unwrap_or(0)
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// True for the set `{0}`, the neutral element of the sumset.
    pub fn is_zero(&self) -> bool {
        self.elems.len() == 1 && self.elems[0] == 0
    }

    /// Elements in `[lo, hi]`.
    pub fn window(&self, lo: u64, hi: u64) -> IntSet {
        let a = self.elems.partition_point(|&x| x < lo);
        let b = self.elems.partition_point(|&x| x <= hi);
        IntSet { elems: self.elems[a..b.max(a)].to_vec() }
    }

    /// Largest element `<= x`.
    pub fn floor(&self, x: u64) -> Option<u64> {
        let i = self.elems.partition_point(|&e| e <= x);
        (i > 0).then(|| self.elems[i - 1])
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        let (a, b) = (&self.elems, &other.elems);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IntSet { elems: out }
    }

    /// `{x * f : x in self}`.
    pub fn scale_up(&self, f: u64) -> IntSet {
        IntSet { elems: self.elems.iter().map(|&x| x * f).collect() }
    }

    /// `{x / f : x in self}`; every element must be a multiple of `f`.
    pub fn scale_down(&self, f: u64) -> IntSet {
        debug_assert!(self.elems.iter().all(|x| x % f == 0));
        IntSet { elems: self.elems.iter().map(|&x| x / f).collect() }
    }

    /// `{x + d : x in self}`.
    pub fn shift(&self, d: u64) -> IntSet {
        IntSet { elems: self.elems.iter().map(|&x| x + d).collect() }
    }

    pub fn is_subset_of(&self, other: &IntSet) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }
}

impl Deref for IntSet {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.elems
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl FromIterator<u64> for IntSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        IntSet::from_unsorted(iter.into_iter().collect())
    }
}

impl From<Vec<u64>> for IntSet {
    fn from(v: Vec<u64>) -> Self {
        IntSet::from_unsorted(v)
    }
}

impl<const N: usize> From<[u64; N]> for IntSet {
    fn from(v: [u64; N]) -> Self {
        IntSet::from_unsorted(v.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sorts_and_dedups() {
        let s = IntSet::from(vec![5, 1, 5, 3]);
        assert_eq!(s.as_slice(), &[1, 3, 5]);
        assert_eq!(s.universe(), 5);
    }

    #[test]
    fn window_and_floor() {
        let s = IntSet::from([0, 2, 4, 6, 8]);
        assert_eq!(s.window(3, 6).as_slice(), &[4, 6]);
        assert!(s.window(9, 3).is_empty());
        assert_eq!(s.floor(5), Some(4));
        assert_eq!(s.floor(0), Some(0));
        assert_eq!(IntSet::from([3]).floor(2), None);
    }

    #[test]
    fn union_merges() {
        let a = IntSet::from([0, 3, 5]);
        let b = IntSet::from([1, 3, 9]);
        assert_eq!(a.union(&b).as_slice(), &[0, 1, 3, 5, 9]);
    }
}
