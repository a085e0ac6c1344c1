//! Wall-time sweeps over `1/ε` and `n`.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use num_rational::Ratio;
use serde::Serialize;
use ssapprox::reduction::{solve_weak_subset_sum, Instance, SolverConfig};

use crate::generate::{generate, Distribution};

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub eps_sweep: Vec<u64>,
    pub n_sweep: Vec<usize>,
    /// `n` used while sweeping `1/ε`.
    pub fixed_n: usize,
    /// `1/ε` used while sweeping `n`.
    pub fixed_inv_eps: u64,
    pub repeats: usize,
    pub max_x: u64,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            eps_sweep: vec![8, 16, 32, 64, 128, 256, 512],
            n_sweep: vec![100, 200, 400, 800, 1600, 3200],
            fixed_n: 50,
            fixed_inv_eps: 8,
            repeats: 3,
            max_x: 1 << 30,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub axis: &'static str,
    pub inv_eps: u64,
    pub n: usize,
    pub median_ms: f64,
    /// Time of this cell over the previous cell on the same axis.
    pub doubling_ratio: Option<f64>,
    pub dense_fraction: f64,
    pub certified_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub median_ratio_eps: Option<f64>,
    pub median_ratio_n: Option<f64>,
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

fn cell(axis: &'static str, inv_eps: u64, n: usize, cfg: &BenchConfig) -> Result<BenchRow> {
    let mut times = Vec::with_capacity(cfg.repeats);
    let (mut dense, mut certified) = (0, 0);
    for r in 0..cfg.repeats {
        let seed = cfg.seed ^ ((r as u64) << 32) ^ n as u64;
        let file = generate(n, cfg.max_x, Distribution::Uniform, seed)?;
        let inst = Instance::new(file.items, file.target.unwrap_or(1), Ratio::new(1, inv_eps))?;
        let start = Instant::now();
        let res = solve_weak_subset_sum(&inst, seed, &SolverConfig::default())?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        dense += usize::from(res.stats.dense_fired);
        certified += usize::from(res.certified);
    }
    let reps = cfg.repeats.max(1) as f64;
    Ok(BenchRow {
        axis,
        inv_eps,
        n,
        median_ms: median(&mut times).unwrap_or(0.0),
        doubling_ratio: None,
        dense_fraction: dense as f64 / reps,
        certified_fraction: certified as f64 / reps,
    })
}

fn fill_ratios(rows: &mut [BenchRow]) -> Option<f64> {
    let mut ratios = Vec::new();
    for i in 1..rows.len() {
        let prev = rows[i - 1].median_ms.max(1e-3);
        let r = rows[i].median_ms / prev;
        rows[i].doubling_ratio = Some(r);
        ratios.push(r);
    }
    median(&mut ratios)
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut eps_rows = Vec::new();
    for &d in &cfg.eps_sweep {
        eps_rows.push(cell("eps", d, cfg.fixed_n, cfg)?);
    }
    let median_ratio_eps = fill_ratios(&mut eps_rows);
    let mut n_rows = Vec::new();
    for &n in &cfg.n_sweep {
        n_rows.push(cell("n", cfg.fixed_inv_eps, n, cfg)?);
    }
    let median_ratio_n = fill_ratios(&mut n_rows);
    eps_rows.extend(n_rows);
    Ok(BenchReport { rows: eps_rows, median_ratio_eps, median_ratio_n })
}

/// Tab-separated table with a header row.
pub fn to_table(report: &BenchReport) -> String {
    let mut s = String::from("axis\tinv_eps\tn\tmedian_ms\tdoubling_ratio\tdense_fraction\tcertified_fraction\n");
    for r in &report.rows {
        let ratio = r.doubling_ratio.map_or("-".to_string(), |x| format!("{x:.3}"));
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{:.3}\t{}\t{:.2}\t{:.2}",
            r.axis, r.inv_eps, r.n, r.median_ms, ratio, r.dense_fraction, r.certified_fraction
        );
    }
    s
}
