//! Instance generators.

use anyhow::{bail, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::format::InstanceFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Distribution {
    /// Values uniform in `[1, max-x]`, target `⌊Σ/2⌋`.
    Uniform,
    /// Partition instance with a known perfect split.
    PlantedPerfect,
    /// Half the items near `t = max-x`, half far below `t/256`.
    TwoCluster,
}

pub fn generate(n: usize, max_x: u64, dist: Distribution, seed: u64) -> Result<InstanceFile> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    if max_x == 0 {
        bail!("max-x must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Distribution::Uniform => {
            let items: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_x)).collect();
            let t = (items.iter().sum::<u64>() / 2).max(1);
            Ok(InstanceFile { items, target: Some(t) })
        }
        Distribution::PlantedPerfect => {
            if n < 2 {
                bail!("a perfect partition needs at least 2 items");
            }
            let mut items = Vec::with_capacity(n);
            let mut pairs = n / 2;
            if n % 2 == 1 {
                // {x, y, x + y} splits evenly.
                let x = rng.gen_range(1..=(max_x / 2).max(1));
                let y = rng.gen_range(1..=(max_x - x).max(1));
                items.extend([x, y, x + y]);
                pairs -= 1;
            }
            for _ in 0..pairs {
                let a = rng.gen_range(1..=max_x);
                items.extend([a, a]);
            }
            items.shuffle(&mut rng);
            Ok(InstanceFile { items, target: None })
        }
        Distribution::TwoCluster => {
            let t = max_x;
            let small_top = (t / 256).max(1);
            let items = (0..n)
                .map(|i| if i % 2 == 0 { rng.gen_range((t / 4).max(1)..=t) } else { rng.gen_range(1..=small_top) })
                .collect();
            Ok(InstanceFile { items, target: Some(t) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_has_even_split() {
        for n in 2..12 {
            let f = generate(n, 50, Distribution::PlantedPerfect, n as u64).unwrap();
            let total: u64 = f.items.iter().sum();
            assert_eq!(total % 2, 0);
            let best = ssapprox::oracle::best_subset_sum(&f.items, total / 2, 1 << 20).unwrap();
            assert_eq!(2 * best, total);
        }
        assert!(generate(1, 50, Distribution::PlantedPerfect, 0).is_err());
    }

    #[test]
    fn seeds_reproduce() {
        let a = generate(30, 1000, Distribution::Uniform, 5).unwrap();
        assert_eq!(a, generate(30, 1000, Distribution::Uniform, 5).unwrap());
        assert_ne!(a, generate(30, 1000, Distribution::Uniform, 6).unwrap());
    }
}
