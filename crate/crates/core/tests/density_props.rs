use proptest::prelude::*;
use ssapprox::approx::check_approximation;
use ssapprox::density::{estimate_density, grid_approximation, is_gamma_dense_bruteforce, DensityVerdict};
use ssapprox::sumset::dense_sumset;
use ssapprox::IntSet;

fn level(u: u64) -> impl Strategy<Value = Vec<IntSet>> {
    (1usize..24, 0.0f64..1.0).prop_flat_map(move |(pairs, fill)| {
        let max_len = ((u as f64 + 1.0) * fill) as usize + 1;
        prop::collection::vec(prop::collection::vec(0..=u, 0..max_len), 2 * pairs).prop_map(|sets| {
            sets.into_iter()
                .map(|mut v| {
                    v.push(0);
                    IntSet::from_unsorted(v)
                })
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn verdicts_are_sound((u, nodes) in (1u64..=64).prop_flat_map(|u| (Just(u), level(u))), gamma in 1u64..4) {
        let c = 4;
        let report = estimate_density(&nodes, gamma, u, c).unwrap();
        let sizes: Vec<u64> = nodes.chunks(2).map(|p| dense_sumset(&p[0], &p[1]).unwrap().len() as u64).collect();
        match &report.verdict {
            DensityVerdict::Dense { indices, size_floor } => {
                let need = 2 * c * gamma * u;
                prop_assert_eq!(*size_floor, need.div_ceil(indices.len() as u64) + 1);
                for &i in indices {
                    prop_assert!(sizes[i] >= *size_floor);
                }
            }
            DensityVerdict::Sparse { level_gamma } => {
                prop_assert_eq!(*level_gamma, 4 * gamma);
                prop_assert!(!is_gamma_dense_bruteforce(&sizes, *level_gamma, 2 * u, c));
            }
        }
        let rounds = 63 - (2 * u + 1).leading_zeros() as u64;
        prop_assert!(report.queries <= rounds * sizes.len() as u64);
        // Each surviving round stays below 2cγu, so the total is below rounds times that.
        prop_assert!(report.weighted_work < rounds as u128 * 2 * (c * gamma * u) as u128);
    }

    #[test]
    fn grid_fills_a_gapped_window(w in 0u64..500, len in 0u64..500, delta in 1u64..40, seed: u64) {
        let v = w + len;
        let grid = grid_approximation(w, v, delta).unwrap();
        // A set whose consecutive elements across [w, v] are at most δ apart.
        let mut s = vec![w];
        let mut x = w;
        let mut state = seed | 1;
        while x < v {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            x = (x + 1 + state % delta).min(v);
            s.push(x);
        }
        let s = IntSet::from_sorted(s);
        prop_assert!(check_approximation(&grid, &s, w, v, delta).is_ok());
    }
}

#[test]
fn corrupted_constant_is_rejected() {
    let nodes = vec![IntSet::from([0, 1]), IntSet::from([0, 2])];
    assert!(estimate_density(&nodes, 1, 4, 0).is_err());
    assert!(estimate_density(&nodes, 0, 4, 4).is_err());
}

#[test]
fn full_pairs_are_dense() {
    let full = IntSet::interval(0, 8);
    let nodes = vec![full; 40];
    let report = estimate_density(&nodes, 1, 8, 4).unwrap();
    assert!(report.verdict.is_dense());
}
