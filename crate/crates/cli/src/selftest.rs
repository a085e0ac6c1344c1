//! Desk-scale property checks with fixed seeds.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use ssapprox::color::{default_q_star, window_color_coding, window_color_coding_relaxed};
use ssapprox::density::{estimate_density, is_gamma_dense_bruteforce, DensityVerdict};
use ssapprox::level::{run_witness_pipeline, WindowParams};
use ssapprox::oracle::{best_subset_sum, DEFAULT_BUDGET};
use ssapprox::reduction::{solve_weak_subset_sum, Instance, SolverConfig};
use ssapprox::sumset::{dense_sumset, mod_reduce, sparse_sumset, sumset_size_at_least};
use ssapprox::IntSet;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub density_c: u64,
    pub scale: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { density_c: 4, scale: 1 }
    }
}

fn suite(name: &'static str, total: usize, mut check: impl FnMut(&mut ChaCha8Rng) -> Result<bool, ssapprox::Error>) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(name.len() as u64 * 7919);
    let passed = (0..total).filter(|_| matches!(check(&mut rng), Ok(true))).count();
    SuiteResult { name, passed, total }
}

fn random_set(rng: &mut ChaCha8Rng, lens: std::ops::RangeInclusive<usize>, max: u64) -> IntSet {
    let len = rng.gen_range(lens);
    let mut v: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=max)).collect();
    v.push(0);
    IntSet::from_unsorted(v)
}

pub fn run_selftest(cfg: &SelftestConfig) -> Vec<SuiteResult> {
    let s = cfg.scale.max(1);
    let c = cfg.density_c;
    vec![
        suite("sumset-engines", 300 * s, |rng| {
            let max = 1u64 << rng.gen_range(4..=20);
            let (a, b) = (random_set(rng, 0..=200, max), random_set(rng, 0..=200, max));
            Ok(sparse_sumset(&a, &b)? == dense_sumset(&a, &b)?)
        }),
        suite("size-test", 300 * s, |rng| {
            let (a, b) = (random_set(rng, 0..=40, 3000), random_set(rng, 0..=40, 3000));
            let k = rng.gen_range(1..1500);
            let size = dense_sumset(&a, &b)?.len() as u64;
            Ok(sumset_size_at_least(&a, &b, k)?.at_least == (size >= k))
        }),
        suite("claim-c1", 300 * s, |rng| {
            let (a, b) = (random_set(rng, 40..=40, 1 << 16), random_set(rng, 40..=40, 1 << 16));
            let k = rng.gen_range(1..4000);
            let small = dense_sumset(&mod_reduce(&a, k)?, &mod_reduce(&b, k)?)?.len();
            let large = dense_sumset(&mod_reduce(&a, 2 * k)?, &mod_reduce(&b, 2 * k)?)?.len();
            Ok(large <= 3 * small)
        }),
        suite("density", 300 * s, |rng| {
            let u = rng.gen_range(1..=64);
            let fill = rng.gen_range(0..=u as usize + 1);
            let nodes: Vec<IntSet> = (0..2 * rng.gen_range(1..20)).map(|_| random_set(rng, fill..=fill, u)).collect();
            let gamma = rng.gen_range(1..4);
            let report = estimate_density(&nodes, gamma, u, c)?;
            let sizes: Vec<u64> =
                nodes.chunks(2).map(|p| dense_sumset(&p[0], &p[1]).map(|s| s.len() as u64)).collect::<Result<_, _>>()?;
            Ok(match report.verdict {
                DensityVerdict::Dense { indices, size_floor } => indices.iter().all(|&i| sizes[i] >= size_floor),
                DensityVerdict::Sparse { level_gamma } => !is_gamma_dense_bruteforce(&sizes, level_gamma, 2 * u, c),
            })
        }),
        suite("color-coding", 100 * s, |rng| {
            let inv_eps = rng.gen_range(4..64);
            let beta = 1u64 << rng.gen_range(0..5);
            let n = 2 * beta as usize + rng.gen_range(0..300);
            let values: Vec<u64> = (0..n).map(|_| rng.gen_range(inv_eps..=2 * inv_eps)).collect();
            let fam = window_color_coding(&values, beta, inv_eps, 1e-4, rng.gen())?;
            Ok(fam.check_partition().is_ok()
                && (0..fam.assignment.len()).all(|j| fam.max_sum(j, &values) >= 4 * beta * inv_eps))
        }),
        suite("witness", 60 * s, |rng| {
            let inv_eps = rng.gen_range(4..32);
            let n = rng.gen_range(1..14);
            let values: Vec<u64> = (0..n).map(|_| rng.gen_range(inv_eps..=2 * inv_eps)).collect();
            let total: u64 = values.iter().sum();
            let beta = 1u64 << rng.gen_range(0..=63 - (total / inv_eps).max(1).leading_zeros());
            let fam = window_color_coding_relaxed(n, beta, inv_eps, default_q_star(n, inv_eps), rng.gen())?;
            let mut params = WindowParams::new(inv_eps, beta, fam.params, c.max(1));
            params.allow_dense = total >= 4 * beta * inv_eps;
            let (vs, trace, _) = run_witness_pipeline(&values, &fam, &params)?;
            for &s in vs.elements.iter() {
                let y = trace.backtrack(s)?;
                let sum: u64 = y.iter().map(|&i| values[i]).sum();
                if sum.abs_diff(s) > vs.delta_cert || y.windows(2).any(|p| p[0] >= p[1]) {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
        suite("end-to-end", 100 * s, |rng| {
            let d = [4u64, 8, 16, 64][rng.gen_range(0..4)];
            let n = rng.gen_range(1..=12);
            let items: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=1 << 16)).collect();
            let t = rng.gen_range(1..=items.iter().sum::<u64>());
            let inst = Instance::new(items.clone(), t, Ratio::new(1, d))?;
            let r = solve_weak_subset_sum(&inst, rng.gen(), &SolverConfig { density_c: c.max(1), ..Default::default() })?;
            let opt = best_subset_sum(&items, t, DEFAULT_BUDGET)?;
            let sum: u64 = r.witness.iter().map(|&i| items[i]).sum();
            Ok(sum == r.value && r.value <= r.upper && r.value as u128 * d as u128 >= (d - 1) as u128 * opt as u128)
        }),
    ]
}
