use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssapprox::color::{cc_params, color_coding, modified_color_coding, window_color_coding, PartitionFamily};
use std::collections::BTreeSet;

fn shattered(fam: &PartitionFamily, y: &[usize]) -> bool {
    fam.assignment.iter().any(|rep| {
        let cells: BTreeSet<u64> = y.iter().map(|&i| rep[i]).collect();
        cells.len() == y.len()
    })
}

/// Failures out of `trials` random `k`-subsets drawn from `pool`.
fn failures(fam_for: impl Fn(u64) -> PartitionFamily, pool: std::ops::Range<usize>, k: usize, trials: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut fails = 0;
    for s in 0..trials {
        let fam = fam_for(s);
        let y: Vec<usize> = sample(&mut rng, pool.len(), k).into_iter().map(|i| i + pool.start).collect();
        fails += u64::from(!shattered(&fam, &y));
    }
    fails
}

/// Allowed failures: the mean at rate `2q` plus four standard deviations.
fn tolerance(q: f64, trials: u64) -> u64 {
    let p = 2.0 * q;
    let n = trials as f64;
    (n * p + 4.0 * (n * p * (1.0 - p)).sqrt()).ceil() as u64
}

#[test]
fn coverage_rate_plain() {
    let (k, q, trials) = (8u64, 0.05, 1000u64);
    let params = cc_params(k, q).unwrap();
    let n = 3 * params.cells() as usize;
    let fails = failures(|s| color_coding(n, k, q, s).unwrap(), 0..n, k as usize, trials);
    assert!(fails <= tolerance(q, trials), "{fails} failures");
}

#[test]
fn coverage_rate_modified() {
    let (k, q, trials) = (8u64, 0.05, 1000u64);
    let half = cc_params(k, q).unwrap().cells() as usize;
    let n = half + 2000;
    let fails = failures(|s| modified_color_coding(n, k, q, s).unwrap(), half..n, k as usize, trials);
    assert!(fails <= tolerance(q, trials), "{fails} failures");
}

#[test]
fn tiny_cells_do_fail_sometimes() {
    // With g forced tiny, collisions are frequent; the harness must see them.
    let fam_for = |s: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let assignment = vec![(0..50).map(|_| rng.gen_range(0..4)).collect()];
        PartitionFamily { params: ssapprox::color::CCParams { m: 1, g: 4, r: 1 }, assignment }
    };
    assert!(failures(fam_for, 0..50, 4, 200) > 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn families_are_partitions(n in 0usize..3000, k in 3u64..64, q in 0.01f64..0.5, seed: u64) {
        let fam = color_coding(n, k, q, seed).unwrap();
        prop_assert!(fam.check_partition().is_ok());
        prop_assert_eq!(&fam, &color_coding(n, k, q, seed).unwrap());
        let fam = modified_color_coding(n, k, q, seed).unwrap();
        prop_assert!(fam.check_partition().is_ok());
        prop_assert_eq!(&fam, &modified_color_coding(n, k, q, seed).unwrap());
    }

    #[test]
    fn max_sum_covers_window(
        inv_eps in 4u64..200,
        log_beta in 0u32..6,
        extra in 0usize..400,
        seed: u64,
    ) {
        let beta = 1u64 << log_beta;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4 * beta as usize + extra;
        let values: Vec<u64> = (0..n).map(|_| rng.gen_range(inv_eps..=2 * inv_eps)).collect();
        let fam = window_color_coding(&values, beta, inv_eps, 1e-4, seed).unwrap();
        for j in 0..fam.assignment.len() {
            prop_assert!(fam.max_sum(j, &values) >= 4 * beta * inv_eps);
        }
    }
}
