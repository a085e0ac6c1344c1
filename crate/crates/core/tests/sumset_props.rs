use num_rational::Ratio;
use proptest::prelude::*;
use ssapprox::approx::check_approximation;
use ssapprox::oracle::brute_subset_sums;
use ssapprox::sumset::{
    approx_sumset_many, approx_sumset_many_traced, approx_sumset_pair, dense_sumset, mod_reduce, sparse_sumset,
    sumset, sumset_size_at_least, Engine, SumsetConfig,
};
use ssapprox::IntSet;

fn set_in(max: u64, len: usize) -> impl Strategy<Value = IntSet> {
    prop::collection::vec(0..=max, 0..len).prop_map(|mut v| {
        v.push(0);
        IntSet::from_unsorted(v)
    })
}

fn naive(a: &IntSet, b: &IntSet) -> IntSet {
    IntSet::from_unsorted(a.iter().flat_map(|&x| b.iter().map(move |&y| x + y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engines_agree(a in set_in(1 << 20, 60), b in set_in(1 << 20, 60)) {
        let d = dense_sumset(&a, &b).unwrap();
        prop_assert_eq!(&d, &naive(&a, &b));
        prop_assert_eq!(&sparse_sumset(&a, &b).unwrap(), &d);
        for engine in [Engine::Dense, Engine::Sparse, Engine::Auto] {
            let cfg = SumsetConfig { engine, ..SumsetConfig::default() };
            prop_assert_eq!(&sumset(&a, &b, &cfg).unwrap(), &d);
        }
    }

    #[test]
    fn size_test_matches_threshold(a in set_in(4000, 40), b in set_in(4000, 40), k in 1u64..2000) {
        let size = dense_sumset(&a, &b).unwrap().len() as u64;
        let test = sumset_size_at_least(&a, &b, k).unwrap();
        prop_assert_eq!(test.at_least, size >= k);
        if let Some(s) = test.sumset {
            prop_assert_eq!(s.len() as u64, size);
        }
    }

    #[test]
    fn claim_c1(a in set_in(1 << 16, 50), b in set_in(1 << 16, 50), k in 1u64..5000) {
        let small = dense_sumset(&mod_reduce(&a, k).unwrap(), &mod_reduce(&b, k).unwrap()).unwrap();
        let large = dense_sumset(&mod_reduce(&a, 2 * k).unwrap(), &mod_reduce(&b, 2 * k).unwrap()).unwrap();
        prop_assert!(large.len() <= 3 * small.len());
    }

    #[test]
    fn pair_is_two_sided(a in set_in(300, 12), b in set_in(300, 12), u in 1u64..700, d in 2u64..20) {
        let eps = Ratio::new(1, d);
        let out = approx_sumset_pair(&a, &b, u, eps).unwrap();
        let exact = dense_sumset(&a, &b).unwrap();
        let delta = u / d;
        prop_assert!(check_approximation(&out, &exact, 0, u, delta).is_ok());
        prop_assert!(out.len() as u64 <= 4 * d + 1);
    }

    #[test]
    fn many_is_two_sided(sets in prop::collection::vec(set_in(200, 6), 1..7), u in 1u64..900, d in 2u64..16) {
        let eps = Ratio::new(1, d);
        let tree = approx_sumset_many_traced(&sets, u, eps).unwrap();
        prop_assert_eq!(&approx_sumset_many(&sets, u, eps).unwrap(), &tree.output);
        let mut exact = IntSet::zero();
        for s in &sets {
            exact = dense_sumset(&exact, s).unwrap();
        }
        prop_assert!(tree.error_bound <= u / d);
        prop_assert!(check_approximation(&tree.output, &exact, 0, u, tree.error_bound).is_ok());
        prop_assert!(tree.output.len() as u64 <= 9 * d);
        for &v in tree.output.iter() {
            let parts = tree.backtrack(v).unwrap();
            prop_assert_eq!(parts.len(), sets.len());
            for (p, s) in parts.iter().zip(&sets) {
                prop_assert!(s.contains(*p));
            }
            let sum: u64 = parts.iter().sum();
            prop_assert!(sum >= v && sum <= v + tree.error_bound);
        }
    }
}

#[test]
fn sparse_regime_with_large_universe() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let na = rng.gen_range(100..400);
        let nb = rng.gen_range(100..400);
        let a = IntSet::from_unsorted((0..na).map(|_| rng.gen_range(0..1u64 << 20)).collect());
        let b = IntSet::from_unsorted((0..nb).map(|_| rng.gen_range(0..1u64 << 20)).collect());
        assert_eq!(sparse_sumset(&a, &b).unwrap(), dense_sumset(&a, &b).unwrap());
    }
}

#[test]
fn structured_sets_agree() {
    let a: IntSet = (0..500).map(|i| i * 1000).collect();
    let b: IntSet = (0..300).map(|i| i * 3).collect();
    assert_eq!(sparse_sumset(&a, &b).unwrap(), dense_sumset(&a, &b).unwrap());
    let c: IntSet = (0..200).map(|i| i * i).collect();
    assert_eq!(sparse_sumset(&c, &c).unwrap(), naive(&c, &c));
    let ap: IntSet = (0..3000).map(|i| i * 7 + 100_000).collect();
    let mixed: IntSet = (0..3000).map(|i| i * 7).chain((0..50).map(|i| 500_000 + i * i)).collect();
    assert_eq!(sparse_sumset(&ap, &mixed).unwrap(), dense_sumset(&ap, &mixed).unwrap());
}

#[test]
fn subset_sums_by_repeated_sumsets() {
    let values = [3u64, 7, 7, 12, 20];
    let mut acc = IntSet::zero();
    for &v in &values {
        acc = dense_sumset(&acc, &IntSet::from([0, v])).unwrap();
    }
    assert_eq!(acc, brute_subset_sums(&values).unwrap());
}
