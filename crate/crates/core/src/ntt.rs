//! Exact integer convolution via number-theoretic transforms.
//!
//! All three moduli are NTT-friendly primes below 2^30, so a product of two
//! residues fits in a `u64`. Combining them with Garner's algorithm recovers
//! any convolution coefficient below `P1 * P2 * P3` (about 2^86) exactly.

const P1: u64 = 998_244_353;
const P2: u64 = 167_772_161;
const P3: u64 = 469_762_049;

/// Longest transform supported by every modulus (`P1 - 1 = 119 * 2^23`).
pub const MAX_LEN: usize = 1 << 23;

/// Exclusive upper bound on coefficients that [`convolve_exact`] reproduces.
pub const EXACT_BOUND: u128 = P1 as u128 * P2 as u128 * P3 as u128;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn transform<const P: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two() && n <= MAX_LEN);
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    // 3 is a primitive root of all three moduli.
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(3, (P - 1) / len as u64, P);
        if invert {
            w = pow_mod(w, P - 2, P);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % P;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * tw[k] % P;
                lo[k] = if u + v >= P { u + v - P } else { u + v };
                hi[k] = if u >= v { u - v } else { u + P - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, P - 2, P);
        for x in a.iter_mut() {
            *x = *x * inv_n % P;
        }
    }
}

/// Cyclic-free convolution of `a` and `b` modulo the prime `P`.
pub fn convolve_mod<const P: u64>(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    assert!(n <= MAX_LEN, "convolution length {n} exceeds NTT limit");
    let mut fa: Vec<u64> = a.iter().map(|&x| x % P).collect();
    let mut fb: Vec<u64> = b.iter().map(|&x| x % P).collect();
    fa.resize(n, 0);
    fb.resize(n, 0);
    transform::<P>(&mut fa, false);
    transform::<P>(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % P;
    }
    transform::<P>(&mut fa, true);
    fa.truncate(out_len);
    fa
}

/// Convolution of 0/1 indicator vectors; returns pair counts modulo `P1`.
///
/// Counts never exceed `min(a.len(), b.len())`, so the result is exact
/// whenever that is below `P1`.
pub fn convolve_counts(a: &[u64], b: &[u64]) -> Vec<u64> {
    debug_assert!(a.len().min(b.len()) < P1 as usize);
    convolve_mod::<P1>(a, b)
}

/// Exact convolution of non-negative coefficient vectors, provided every true
/// output coefficient is below [`EXACT_BOUND`].
pub fn convolve_exact(a: &[u64], b: &[u64]) -> Vec<u128> {
    let r1 = convolve_mod::<P1>(a, b);
    let r2 = convolve_mod::<P2>(a, b);
    let r3 = convolve_mod::<P3>(a, b);
    garner(&r1, &r2, &r3)
}

fn garner(r1: &[u64], r2: &[u64], r3: &[u64]) -> Vec<u128> {
    let inv_p1_mod_p2 = pow_mod(P1 % P2, P2 - 2, P2);
    let p1p2_mod_p3 = (P1 % P3) * (P2 % P3) % P3;
    let inv_p1p2_mod_p3 = pow_mod(p1p2_mod_p3, P3 - 2, P3);
    r1.iter()
        .zip(r2)
        .zip(r3)
        .map(|((&x1, &x2), &x3)| {
            let k1 = ((x2 + P2 - x1 % P2) % P2) * inv_p1_mod_p2 % P2;
            let x12 = x1 as u128 + P1 as u128 * k1 as u128;
            let x12_mod_p3 = (x12 % P3 as u128) as u64;
            let k2 = ((x3 + P3 - x12_mod_p3) % P3) * inv_p1p2_mod_p3 % P3;
            x12 + (P1 as u128 * P2 as u128) * k2 as u128
        })
        .collect()
}

/// Per-residue moments of a set: count, sum of quotients, sum of squared quotients.
pub struct Moments<'a> {
    pub count: &'a [u64],
    pub first: &'a [u64],
    pub second: &'a [u64],
}

/// Pair-count, first and second moment convolutions of two sets' moments:
/// `N = c_a * c_b`, `S1 = f_a * c_b + c_a * f_b`,
/// `S2 = s_a * c_b + 2 f_a * f_b + c_a * s_b`, each exact below [`EXACT_BOUND`].
pub fn moment_convolutions(a: &Moments, b: &Moments) -> [Vec<u128>; 3] {
    let [n1, f1, s1] = moments_mod::<P1>(a, b);
    let [n2, f2, s2] = moments_mod::<P2>(a, b);
    let [n3, f3, s3] = moments_mod::<P3>(a, b);
    [garner(&n1, &n2, &n3), garner(&f1, &f2, &f3), garner(&s1, &s2, &s3)]
}

fn moments_mod<const P: u64>(a: &Moments, b: &Moments) -> [Vec<u64>; 3] {
    let out_len = a.count.len() + b.count.len() - 1;
    let n = out_len.next_power_of_two();
    assert!(n <= MAX_LEN, "convolution length {n} exceeds NTT limit");
    let spectrum = |v: &[u64]| {
        let mut f: Vec<u64> = v.iter().map(|&x| x % P).collect();
        f.resize(n, 0);
        transform::<P>(&mut f, false);
        f
    };
    let (ca, fa, sa) = (spectrum(a.count), spectrum(a.first), spectrum(a.second));
    let (cb, fb, sb) = (spectrum(b.count), spectrum(b.first), spectrum(b.second));
    let mut pairs = vec![0u64; n];
    let mut first = vec![0u64; n];
    let mut second = vec![0u64; n];
    for i in 0..n {
        pairs[i] = ca[i] * cb[i] % P;
        first[i] = (fa[i] * cb[i] + ca[i] * fb[i]) % P;
        let cross = 2 * (fa[i] * fb[i] % P);
        second[i] = ((sa[i] * cb[i] % P) + cross + (ca[i] * sb[i] % P)) % P;
    }
    for v in [&mut pairs, &mut first, &mut second] {
        transform::<P>(v, true);
        v.truncate(out_len);
    }
    [pairs, first, second]
}
