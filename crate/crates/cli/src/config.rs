//! Process-wide defaults.

use anyhow::{bail, Context, Result};
use num_rational::Ratio;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "SSAPPROX_SEED";

/// Seed used when `--seed` is not given.
pub const FALLBACK_SEED: u64 = 0x5eed;

pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().with_context(|| format!("{SEED_ENV}={s:?} is not a u64")),
        Err(std::env::VarError::NotPresent) => Ok(FALLBACK_SEED),
        Err(e) => bail!("{SEED_ENV}: {e}"),
    }
}

pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    flag.map_or_else(default_seed, Ok)
}

/// Accepts `1/8`, `0.125` or `.125`; decimals are read exactly.
pub fn parse_epsilon(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let eps = if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
        let d: u64 = d.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            bail!("zero denominator in {s:?}");
        }
        Ratio::new(n, d)
    } else {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || s == "." {
            bail!("epsilon {s:?} is not a decimal or fraction");
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse()? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse()? };
        Ratio::new(int * den + frac, den)
    };
    if *eps.numer() == 0 || eps.numer() >= eps.denom() {
        bail!("epsilon {s} is not in (0, 1)");
    }
    Ok(eps)
}
