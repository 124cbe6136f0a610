//! Sample paths, the block decomposition of partial sums and independent
//! coupling blocks.

mod mc;

pub use mc::{
    derive_seed, mc_map, mc_run, mix64, replicate_rng, stream_seed, MCConfig, MonteCarloEstimate,
    ReplicateRng,
};
pub(crate) use mc::estimate_from;

use crate::error::{Error, Result};
use crate::model::{InnovationLaw, MAModel};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Geometry of the block decomposition `S_n = Σ_{j≤m} Y_j + Y_{m+1}` with
/// blocks of length `p = ⌊n^{1−α}⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockScheme {
    pub n: u64,
    pub alpha: f64,
    /// `p_n`
    pub block_len: u64,
    /// `m_n = ⌊n/p_n⌋`
    pub block_count: u64,
    pub remainder_len: u64,
}

impl BlockScheme {
    pub fn new(n: u64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Scheme(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if n == 0 {
            return Err(Error::Scheme("sample length must be positive".into()));
        }
        let raw = (n as f64).powf(1.0 - alpha);
        // absorb pow rounding when n^{1−α} is an exact integer
        let p = (raw * (1.0 + 1e-12)).floor().max(1.0) as u64;
        if 2 * p >= n {
            return Err(Error::Scheme(format!(
                "block length {p} is not below n/2 = {}",
                n as f64 / 2.0
            )));
        }
        let m = n / p;
        Ok(BlockScheme {
            n,
            alpha,
            block_len: p,
            block_count: m,
            remainder_len: n - m * p,
        })
    }

    /// Half-open 0-based index range of block `j` (1-based), `j = m+1` being
    /// the remainder.
    pub fn block_range(&self, j: u64) -> std::ops::Range<usize> {
        let p = self.block_len as usize;
        let start = (j as usize - 1) * p;
        if j == self.block_count + 1 {
            start..self.n as usize
        } else {
            start..start + p
        }
    }
}

/// Block sums `Y_{1,n}, …, Y_{m,n}` and the remainder `Y_{m+1,n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSums {
    pub blocks: Vec<f64>,
    /// Zero when the scheme has no remainder.
    pub remainder: f64,
}

impl BlockSums {
    /// Blocks then remainder, added left to right.
    pub fn total(&self) -> f64 {
        self.blocks.iter().sum::<f64>() + self.remainder
    }
}

pub fn block_sums(path: &[f64], scheme: &BlockScheme) -> Result<BlockSums> {
    if path.len() as u64 != scheme.n {
        return Err(Error::Dimension {
            expected: scheme.n as usize,
            got: path.len(),
        });
    }
    let blocks = (1..=scheme.block_count)
        .map(|j| path[scheme.block_range(j)].iter().sum())
        .collect();
    let remainder = path[scheme.block_range(scheme.block_count + 1)].iter().sum();
    Ok(BlockSums { blocks, remainder })
}

/// Stationary path `X_1..X_n` of `model`, reproducible from `seed`.
pub fn sample_path(model: &MAModel, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    sample_path_with(model, n, &mut rng)
}

/// `X_t = Σ_k a_k Z_{t−k}`; the first K innovations form the burn-in so
/// `X_1` already has the stationary law.
pub fn sample_path_with<R: Rng + ?Sized>(model: &MAModel, n: usize, rng: &mut R) -> Vec<f64> {
    let law = model.innovation();
    let w = model.weights();
    let k = w.len() - 1;
    let z: Vec<f64> = (0..n + k).map(|_| law.sample(rng)).collect();
    (0..n)
        .map(|t| {
            let head = t + k;
            w.iter().enumerate().map(|(i, a)| a * z[head - i]).sum()
        })
        .collect()
}

/// Exact sampler of the partial sum `S_len` of a stationary path.
///
/// `S_len = Σ_s w_s Z_s` where `w_s` is the total weight innovation `Z_s`
/// receives. Innovations fully inside the window all carry `Σ a_k` and are
/// drawn as one aggregated sum (see [`InnovationLaw::sample_sum`]); the at
/// most 2K edge innovations are drawn individually.
#[derive(Clone, Debug)]
pub struct PartialSumSampler {
    law: InnovationLaw,
    interior_count: u64,
    interior_weight: f64,
    edge_weights: Vec<f64>,
}

impl PartialSumSampler {
    pub fn new(model: &MAModel, len: u64) -> Self {
        let w = model.weights();
        let k = (w.len() - 1) as i64;
        let n = len as i64;
        let mut prefix = Vec::with_capacity(w.len() + 1);
        prefix.push(0.0);
        for a in w {
            prefix.push(prefix.last().unwrap() + a);
        }
        let total = model.weight_sum();
        let interior_count = (n - k).max(0) as u64;
        let weight_of = |s: i64| -> f64 {
            let lo = (1 - s).max(0);
            let hi = k.min(n - s);
            if hi < lo {
                0.0
            } else {
                prefix[(hi + 1) as usize] - prefix[lo as usize]
            }
        };
        let mut edge_weights = Vec::new();
        for s in (1 - k)..=0 {
            edge_weights.push(weight_of(s));
        }
        let tail_start = if interior_count > 0 { n - k + 1 } else { 1 };
        for s in tail_start.max(1)..=n {
            edge_weights.push(weight_of(s));
        }
        PartialSumSampler {
            law: model.innovation().clone(),
            interior_count,
            interior_weight: total,
            edge_weights,
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut acc = self.interior_weight * self.law.sample_sum(self.interior_count, rng);
        for w in &self.edge_weights {
            acc += w * self.law.sample(rng);
        }
        acc
    }

    /// Sum of squared innovation weights times the innovation variance; equals
    /// `s_len²`.
    pub fn variance(&self) -> f64 {
        let edge: f64 = self.edge_weights.iter().map(|w| w * w).sum();
        self.law.variance() * (self.interior_count as f64 * self.interior_weight.powi(2) + edge)
    }
}

/// `m_n` independent coupling blocks, each distributed as `Y_{1,n}`.
pub fn coupling_block_sums(model: &MAModel, scheme: &BlockScheme, seed: u64) -> Vec<f64> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    coupling_block_sums_with(model, scheme, &mut rng)
}

pub fn coupling_block_sums_with<R: Rng + ?Sized>(
    model: &MAModel,
    scheme: &BlockScheme,
    rng: &mut R,
) -> Vec<f64> {
    let sampler = PartialSumSampler::new(model, scheme.block_len);
    (0..scheme.block_count).map(|_| sampler.sample(rng)).collect()
}

/// Writes a `replicate_id,value` CSV dump.
pub fn write_replicates_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "replicate_id,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{v}")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InnovationLaw;

    #[test]
    fn scheme_floor_arithmetic() {
        let s = BlockScheme::new(1000, 0.5).unwrap();
        assert_eq!((s.block_len, s.block_count, s.remainder_len), (31, 32, 8));
        let s = BlockScheme::new(100, 0.99).unwrap();
        assert_eq!((s.block_len, s.block_count, s.remainder_len), (1, 100, 0));
        let s = BlockScheme::new(1024, 0.5).unwrap();
        assert_eq!((s.block_len, s.block_count, s.remainder_len), (32, 32, 0));
        assert!(matches!(BlockScheme::new(10, 0.1), Err(Error::Scheme(_))));
        assert!(BlockScheme::new(100, 0.0).is_err());
        assert!(BlockScheme::new(100, 1.0).is_err());
    }

    #[test]
    fn block_sums_of_small_path() {
        let scheme = BlockScheme {
            n: 5,
            alpha: 0.5,
            block_len: 2,
            block_count: 2,
            remainder_len: 1,
        };
        let sums = block_sums(&[1.0, 2.0, 3.0, 4.0, 5.0], &scheme).unwrap();
        assert_eq!(sums.blocks, vec![3.0, 7.0]);
        assert_eq!(sums.remainder, 5.0);
        let zeros = block_sums(&[0.0; 5], &scheme).unwrap();
        assert!(zeros.blocks.iter().all(|b| *b == 0.0));
        assert!(matches!(
            block_sums(&[1.0; 4], &scheme),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn remainder_is_zero_without_tail() {
        let scheme = BlockScheme::new(1024, 0.5).unwrap();
        let sums = block_sums(&vec![1.0; 1024], &scheme).unwrap();
        assert_eq!(sums.remainder, 0.0);
        assert_eq!(sums.total(), 1024.0);
    }

    #[test]
    fn paths_are_reproducible() {
        let m = MAModel::geometric(0.5, 8, InnovationLaw::exponential(1.0).unwrap()).unwrap();
        assert_eq!(sample_path(&m, 50, 9), sample_path(&m, 50, 9));
        assert_ne!(sample_path(&m, 50, 9), sample_path(&m, 50, 10));
    }

    #[test]
    fn partial_sum_weights_reproduce_variance() {
        for (w, len) in [
            (vec![1.0], 7u64),
            (vec![1.0, 0.5, 0.25], 1),
            (vec![1.0, 0.5, 0.25], 2),
            (vec![1.0, 0.5, 0.25], 10),
            (vec![0.3, 0.0, 2.0, 1.0], 5),
        ] {
            let m = MAModel::new(w, InnovationLaw::gaussian()).unwrap();
            let sampler = PartialSumSampler::new(&m, len);
            let exact = m.partial_sum_variance(len);
            assert!(
                (sampler.variance() - exact).abs() < 1e-12 * exact,
                "len {len}: {} vs {exact}",
                sampler.variance()
            );
        }
    }
}
