//! Solving and checking instance files.

use std::time::Instant;

use anyhow::{bail, Result};
use num_rational::Ratio;
use ssapprox::oracle::{best_subset_sum, DEFAULT_BUDGET};
use ssapprox::reduction::{solve_partition, solve_weak_subset_sum, Instance, Mode, SolveResult, SolverConfig};

use crate::format::{InstanceFile, ProblemMode, ResultDocument};

pub fn solve(file: &InstanceFile, mode: ProblemMode, eps: Ratio<u64>, seed: u64, value_only: bool) -> Result<ResultDocument> {
    let cfg = SolverConfig { mode: if value_only { Mode::ValueOnly } else { Mode::Witness }, ..SolverConfig::default() };
    let start = Instant::now();
    let (r, t) = match mode {
        ProblemMode::SubsetSum => {
            let Some(t) = file.target else {
                bail!("subset-sum mode needs a target in the header");
            };
            (solve_weak_subset_sum(&Instance::new(file.items.clone(), t, eps)?, seed, &cfg)?, t)
        }
        ProblemMode::Partition => {
            let total: u64 = file.items.iter().sum();
            (solve_partition(&file.items, eps, seed, &cfg)?.side, total / 2)
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(document(&r, mode, file.items.len(), t, value_only, wall_ms))
}

fn document(r: &SolveResult, mode: ProblemMode, n: usize, t: u64, value_only: bool, wall_ms: f64) -> ResultDocument {
    let (lower, upper) = r.guarantee();
    ResultDocument {
        mode,
        n,
        t,
        epsilon: r.eps.to_string(),
        seed: r.seed,
        value_only,
        value: r.value,
        witness: r.witness.clone(),
        delta_cert: r.delta_cert,
        opt_upper: r.opt_upper,
        guarantee_lower: lower,
        guarantee_upper: upper,
        certified: r.certified,
        wall_ms,
        levels: r.stats.levels,
        dense_fired: r.stats.dense_fired,
        sumset_calls: r.stats.sumset_calls,
        windows: r.stats.windows,
        escalations: r.stats.escalations,
        inv_eps_internal: r.stats.inv_eps_internal,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub opt: u64,
    /// `value / OPT`, or 1 when `OPT = 0`.
    pub ratio: f64,
    pub failures: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact optimum: the best subset sum not above `t` (or `⌊Σ/2⌋` for Partition).
pub fn optimum(file: &InstanceFile, mode: ProblemMode) -> Result<u64> {
    let cap = match mode {
        ProblemMode::SubsetSum => file.target.ok_or_else(|| anyhow::anyhow!("instance has no target"))?,
        ProblemMode::Partition => file.items.iter().sum::<u64>() / 2,
    };
    Ok(best_subset_sum(&file.items, cap, DEFAULT_BUDGET)?)
}

/// Recomputes OPT and checks the document's arithmetic and guarantee.
pub fn check(file: &InstanceFile, doc: &ResultDocument, eps: Ratio<u64>) -> Result<Verdict> {
    let opt = optimum(file, doc.mode)?;
    let mut failures = Vec::new();
    if doc.n != file.items.len() {
        failures.push(format!("document says n={} but the instance has {}", doc.n, file.items.len()));
    }
    let (num, den) = (*eps.numer() as u128, *eps.denom() as u128);
    let t = match doc.mode {
        ProblemMode::SubsetSum => file.target.unwrap_or(0),
        ProblemMode::Partition => file.items.iter().sum::<u64>() / 2,
    };
    let upper = match doc.mode {
        ProblemMode::SubsetSum => ((den + num) * t as u128 / den) as u64,
        ProblemMode::Partition => t,
    };
    if !doc.value_only {
        let mut seen = vec![false; file.items.len()];
        let mut sum = 0u128;
        for &i in &doc.witness {
            match seen.get_mut(i) {
                None => failures.push(format!("witness index {i} out of range")),
                Some(true) => failures.push(format!("witness index {i} repeated")),
                Some(s) => {
                    *s = true;
                    sum += file.items[i] as u128;
                }
            }
        }
        if sum != doc.value as u128 {
            failures.push(format!("arithmetic mismatch: witness sums to {sum}, document says {}", doc.value));
        }
    }
    if doc.value > upper {
        failures.push(format!("value {} exceeds the upper bound {upper}", doc.value));
    }
    if (doc.value as u128) * den < (den - num) * opt as u128 {
        failures.push(format!("value {} below (1 - {eps}) * OPT = {}", doc.value, ((den - num) * opt as u128).div_ceil(den)));
    }
    let ratio = if opt == 0 { 1.0 } else { doc.value as f64 / opt as f64 };
    Ok(Verdict { opt, ratio, failures })
}
