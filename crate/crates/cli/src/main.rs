use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ssapprox_cli::bench::{run_bench, to_table, BenchConfig};
use ssapprox_cli::config::{parse_epsilon, resolve_seed, SEED_ENV};
use ssapprox_cli::format::{InstanceFile, ProblemMode, ResultDocument};
use ssapprox_cli::generate::{generate, Distribution};
use ssapprox_cli::run::{check, optimum, solve};
use ssapprox_cli::selftest::{run_selftest, SelftestConfig};

#[derive(Parser)]
#[command(name = "ssapprox", version, about = "Approximate Subset Sum and Partition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    SubsetSum,
    Partition,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        input: PathBuf,
        #[arg(long, short)]
        epsilon: String,
        /// Defaults to partition for files without a target.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Falls back to the SSAPPROX_SEED environment variable.
        #[arg(long)]
        seed: Option<u64>,
        /// Report an approximate value without a witness.
        #[arg(long)]
        value_only: bool,
        #[arg(long)]
        json: bool,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an instance file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1 << 20)]
        max_x: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: Distribution,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute OPT exactly and optionally check a result document.
    Oracle {
        input: PathBuf,
        #[arg(long, short)]
        epsilon: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Time the solver across `1/ε` and `n` sweeps.
    Bench {
        /// Comma-separated `1/ε` values.
        #[arg(long, value_delimiter = ',')]
        eps_sweep: Option<Vec<u64>>,
        /// Comma-separated item counts.
        #[arg(long, value_delimiter = ',')]
        n_sweep: Option<Vec<usize>>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites at desk scale.
    Selftest {
        #[arg(long, default_value_t = 4)]
        density_c: u64,
        #[arg(long, default_value_t = 1)]
        scale: usize,
    },
}

/// Writes through a temporary file so readers never see partial output.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn problem_mode(arg: Option<ModeArg>, file: &InstanceFile) -> Result<ProblemMode> {
    Ok(match (arg, file.target) {
        (Some(ModeArg::Partition), _) | (None, None) => ProblemMode::Partition,
        (Some(ModeArg::SubsetSum), None) => bail!("subset-sum mode needs a header of the form \"n t\""),
        (Some(ModeArg::SubsetSum), Some(_)) | (None, Some(_)) => ProblemMode::SubsetSum,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { input, epsilon, mode, seed, value_only, json, out } => {
            let eps = parse_epsilon(&epsilon)?;
            let seed = resolve_seed(seed)?;
            let file = InstanceFile::read(&input)?;
            let mode = problem_mode(mode, &file)?;
            let doc = solve(&file, mode, eps, seed, value_only)?;
            let text = if json { serde_json::to_string_pretty(&doc)? + "\n" } else { doc.to_text() };
            emit(out.as_deref(), &text)?;
            if !doc.certified {
                eprintln!("warning: guarantee not certified (delta_cert={}, opt_upper={})", doc.delta_cert, doc.opt_upper);
                return Ok(ExitCode::from(2));
            }
        }
        Command::Gen { n, max_x, dist, seed, out } => {
            let file = generate(n, max_x, dist, resolve_seed(seed)?)?;
            emit(out.as_deref(), &file.to_text())?;
        }
        Command::Oracle { input, epsilon, mode, check: result } => {
            let file = InstanceFile::read(&input)?;
            let Some(path) = result else {
                println!("opt={}", optimum(&file, problem_mode(mode, &file)?)?);
                return Ok(ExitCode::SUCCESS);
            };
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let doc = ResultDocument::parse(&text)?;
            let eps = parse_epsilon(epsilon.as_deref().unwrap_or(&doc.epsilon))?;
            let verdict = check(&file, &doc, eps)?;
            println!("opt={}", verdict.opt);
            println!("value={}", doc.value);
            println!("ratio={:.6}", verdict.ratio);
            for f in &verdict.failures {
                println!("violation: {f}");
            }
            println!("verdict={}", if verdict.passed() { "pass" } else { "fail" });
            if !verdict.passed() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Bench { eps_sweep, n_sweep, repeats, seed, json, out } => {
            let mut cfg = BenchConfig { repeats, seed: resolve_seed(seed)?, ..BenchConfig::default() };
            if let Some(e) = eps_sweep {
                cfg.eps_sweep = e;
            }
            if let Some(n) = n_sweep {
                cfg.n_sweep = n;
            }
            let report = run_bench(&cfg)?;
            let text = if json { serde_json::to_string_pretty(&report)? + "\n" } else { to_table(&report) };
            emit(out.as_deref(), &text)?;
            for (axis, ratio, limit) in [("1/eps", report.median_ratio_eps, 2.8), ("n", report.median_ratio_n, 2.5)] {
                if let Some(r) = ratio {
                    let note = if r <= limit { "ok" } else { "above advisory limit" };
                    eprintln!("median doubling ratio in {axis}: {r:.3} ({note}, limit {limit})");
                }
            }
        }
        Command::Selftest { density_c, scale } => {
            let results = run_selftest(&SelftestConfig { density_c, scale });
            let mut ok = true;
            for r in &results {
                println!("{:<14} {}/{} {}", r.name, r.passed, r.total, if r.ok() { "pass" } else { "FAIL" });
                ok &= r.ok();
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if std::env::var_os(SEED_ENV).is_some() {
                eprintln!("note: {SEED_ENV} is set");
            }
            ExitCode::FAILURE
        }
    }
}
