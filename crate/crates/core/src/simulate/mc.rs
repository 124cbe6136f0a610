//! Deterministic parallel Monte Carlo.
//!
//! Replicate `r` always draws from its own generator, seeded by
//! [`stream_seed`]`(master_seed, r)`, and results are combined in ascending
//! replicate order. The thread count and the chunking hint therefore change
//! only the schedule, never the bits of the output.

use crate::error::{Error, Result};
use crate::special::mean_and_stderr;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Generator handed to each replicate.
pub type ReplicateRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `r`: `mix64(master + (r+1)·γ)` with γ the 64-bit golden
/// ratio increment, i.e. the `r`-th output of a SplitMix64 stream started at
/// `master`.
#[inline]
pub fn stream_seed(master_seed: u64, replicate: u64) -> u64 {
    mix64(master_seed.wrapping_add(replicate.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Derives an independent master seed for a sub-experiment labelled `tag`.
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    mix64(mix64(master_seed ^ 0xA076_1D64_78BD_642F).wrapping_add(mix64(tag)))
}

pub fn replicate_rng(master_seed: u64, replicate: u64) -> ReplicateRng {
    Xoshiro256PlusPlus::seed_from_u64(stream_seed(master_seed, replicate))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCConfig {
    pub replicates: u64,
    pub master_seed: u64,
    /// Minimum number of replicates per parallel work item. Scheduling only.
    #[serde(default = "default_chunk")]
    pub chunk: usize,
}

fn default_chunk() -> usize {
    256
}

impl MCConfig {
    pub fn new(replicates: u64, master_seed: u64) -> Self {
        MCConfig {
            replicates,
            master_seed,
            chunk: default_chunk(),
        }
    }

    pub fn with_chunk(mut self, chunk: usize) -> Self {
        self.chunk = chunk.max(1);
        self
    }

    /// Same replicate count and schedule, fresh seed derived from `tag`.
    pub fn derived(&self, tag: u64) -> Self {
        MCConfig {
            master_seed: derive_seed(self.master_seed, tag),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicate count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Value with its Monte Carlo standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub stderr: f64,
    pub replicates: u64,
    pub master_seed: u64,
}

impl MonteCarloEstimate {
    /// Estimate known without sampling error.
    pub fn exact(value: f64, config: &MCConfig) -> Self {
        MonteCarloEstimate {
            value,
            stderr: 0.0,
            replicates: config.replicates,
            master_seed: config.master_seed,
        }
    }

    /// Whether `target` lies within `k` standard errors.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// Runs `f` once per replicate and returns the outputs in replicate order.
pub fn mc_map<T, F>(config: &MCConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ReplicateRng) -> T + Sync + Send,
{
    config.validate()?;
    let master = config.master_seed;
    let count = usize::try_from(config.replicates)
        .map_err(|_| Error::Config("replicate count exceeds the address space".into()))?;
    Ok((0..count)
        .into_par_iter()
        .with_min_len(config.chunk.max(1))
        .map(|r| {
            let r = r as u64;
            let mut rng = replicate_rng(master, r);
            f(r, &mut rng)
        })
        .collect())
}

/// Mean-type estimator: average of `f` over replicates with stderr
/// `sd/√R`.
pub fn mc_run<F>(config: &MCConfig, f: F) -> Result<MonteCarloEstimate>
where
    F: Fn(u64, &mut ReplicateRng) -> f64 + Sync + Send,
{
    let values = mc_map(config, f)?;
    Ok(estimate_from(&values, config))
}

pub(crate) fn estimate_from(values: &[f64], config: &MCConfig) -> MonteCarloEstimate {
    let (value, stderr) = mean_and_stderr(values);
    MonteCarloEstimate {
        value,
        stderr,
        replicates: config.replicates,
        master_seed: config.master_seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;

    #[test]
    fn constant_estimator_has_zero_error() {
        let est = mc_run(&MCConfig::new(100, 7), |_, _| 1.0).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.replicates, 100);
    }

    #[test]
    fn zero_replicates_is_a_config_error() {
        assert!(matches!(
            mc_run(&MCConfig::new(0, 1), |_, _| 0.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn chunking_does_not_change_bits() {
        let f = |_: u64, rng: &mut ReplicateRng| rng.random::<f64>().ln();
        let a = mc_run(&MCConfig::new(10_000, 42).with_chunk(1), f).unwrap();
        let b = mc_run(&MCConfig::new(10_000, 42).with_chunk(64), f).unwrap();
        let c = mc_run(&MCConfig::new(10_000, 42), f).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), c.stderr.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let f = |r: u64, rng: &mut ReplicateRng| rng.random::<f64>() * r as f64;
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_run(&MCConfig::new(5_000, 3), f).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn streams_differ_across_replicates_and_masters() {
        assert_ne!(stream_seed(0, 0), stream_seed(0, 1));
        assert_ne!(stream_seed(0, 0), stream_seed(1, 0));
        assert_ne!(derive_seed(5, 1), derive_seed(5, 2));
    }
}
