//! Characteristic functions of block sums: empirical estimates, Newman's
//! covariance bound on joint vs. product characteristic functions, the
//! coupling product deviation and the Esséen smoothing bound.

use crate::error::{domain, Error, Result};
use crate::model::MAModel;
use crate::quadrature;
use crate::simulate::{
    block_sums, mc_map, sample_path_with, BlockScheme, MCConfig, MonteCarloEstimate,
    PartialSumSampler,
};
use crate::special::KahanSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Empirical characteristic function at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CFEstimate {
    pub t: f64,
    pub value: Complex64,
    /// Standard error of the real part.
    pub stderr_re: f64,
    /// Standard error of the imaginary part.
    pub stderr_im: f64,
}

impl CFEstimate {
    /// Larger of the two component standard errors.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.max(self.stderr_im)
    }
}

pub fn empirical_cf(samples: &[f64], t: f64) -> Result<CFEstimate> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let r = samples.len() as f64;
    let (mut sc, mut ss, mut scc, mut sss) = (0.0, 0.0, 0.0, 0.0);
    for x in samples {
        let (s, c) = (t * x).sin_cos();
        sc += c;
        ss += s;
        scc += c * c;
        sss += s * s;
    }
    let mc = sc / r;
    let ms = ss / r;
    let se = |sum_sq: f64, mean: f64| {
        if samples.len() < 2 {
            0.0
        } else {
            ((sum_sq / r - mean * mean).max(0.0) * r / (r - 1.0) / r).sqrt()
        }
    };
    Ok(CFEstimate {
        t,
        value: Complex64::new(mc, ms),
        stderr_re: se(scc, mc),
        stderr_im: se(sss, ms),
    })
}

fn ecf_value(samples: &[f64], t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in samples {
        let (s, c) = (t * x).sin_cos();
        acc.re += c;
        acc.im += s;
    }
    acc / samples.len() as f64
}

/// Constants of the smoothing inequality
/// `sup|F − Φ| ≤ c₁ ∫_{−T}^{T} |f(t) − e^{−t²/2}|/|t| dt + c₂/T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParameters {
    /// Truncation frequency T.
    pub truncation: f64,
    /// 1/π
    pub integral_constant: f64,
    /// 24/(π√(2π)), i.e. 24·sup Φ′/π.
    pub tail_constant: f64,
}

impl SmoothingParameters {
    pub fn new(truncation: f64) -> Result<Self> {
        if !(truncation > 0.0) || !truncation.is_finite() {
            return Err(domain(format!("truncation frequency must be positive, got {truncation}")));
        }
        Ok(SmoothingParameters {
            truncation,
            integral_constant: 1.0 / PI,
            tail_constant: 24.0 / (PI * (2.0 * PI).sqrt()),
        })
    }

    /// `T = (log n)^b · n^{α/2}` with `b < 0`.
    pub fn for_blocks(n: u64, alpha: f64, b: f64) -> Result<Self> {
        if !(b < 0.0) {
            return Err(domain(format!("log exponent b must be negative, got {b}")));
        }
        if n < 3 {
            return Err(domain("need n >= 3 so that log n > 1"));
        }
        let nf = n as f64;
        SmoothingParameters::new(nf.ln().powf(b) * nf.powf(alpha / 2.0))
    }
}

/// Default log exponent for [`SmoothingParameters::for_blocks`].
pub const DEFAULT_LOG_EXPONENT: f64 = -0.1;

fn check_block_index(scheme: &BlockScheme, j: u64) -> Result<()> {
    if j == 0 || j > scheme.block_count {
        return Err(domain(format!(
            "block index {j} outside 1..={}",
            scheme.block_count
        )));
    }
    Ok(())
}

/// `Cov(Y_j, Y_k) = Σ_{a∈block j} Σ_{b∈block k} c_{|a−b|}`, grouped by lag:
/// the pair offset `D + e`, `e ∈ (−p, p)`, occurs `p − |e|` times.
pub fn block_covariance(model: &MAModel, scheme: &BlockScheme, j: u64, k: u64) -> Result<f64> {
    check_block_index(scheme, j)?;
    check_block_index(scheme, k)?;
    let p = scheme.block_len as i64;
    let offset = (j as i64 - k as i64) * p;
    let mut acc = KahanSum::new();
    for e in (1 - p)..p {
        let lag = (offset + e).unsigned_abs();
        let c = model.autocovariance(lag);
        if c != 0.0 {
            acc.add((p - e.abs()) as f64 * c);
        }
    }
    Ok(acc.value())
}

/// Both sides of `Σ_{j>k} Cov(Y_j, Y_k) = (s²_{mp} − m·s²_p)/2`.
pub fn block_covariance_identity(model: &MAModel, scheme: &BlockScheme) -> Result<(f64, f64)> {
    let m = scheme.block_count;
    let p = scheme.block_len;
    let k_max = model.order() as u64;
    let mut lhs = KahanSum::new();
    for j in 2..=m {
        for k in 1..j {
            // nearest pair of indices is (j−k−1)p+1 apart
            if (j - k - 1) * p + 1 > k_max {
                continue;
            }
            lhs.add(block_covariance(model, scheme, j, k)?);
        }
    }
    let rhs = (model.partial_sum_variance(m * p) - m as f64 * model.partial_sum_variance(p)) / 2.0;
    Ok((lhs.value(), rhs))
}

/// Newman's inequality evaluated on one Monte Carlo run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NewmanCheck {
    /// `|E e^{iΣ t_j Y_j} − Π E e^{i t_j Y_j}|`, estimated.
    pub lhs: MonteCarloEstimate,
    /// `Σ_{i<j} |t_i||t_j| Cov(Y_i, Y_j)`, exact.
    pub rhs: f64,
}

impl NewmanCheck {
    pub fn holds(&self, k: f64) -> bool {
        self.lhs.value <= self.rhs + k * self.lhs.stderr
    }
}

pub fn newman_rhs(model: &MAModel, scheme: &BlockScheme, t_vec: &[f64]) -> Result<f64> {
    let mut acc = KahanSum::new();
    for j in 2..=scheme.block_count {
        for i in 1..j {
            let (ti, tj) = (t_vec[i as usize - 1], t_vec[j as usize - 1]);
            if ti == 0.0 || tj == 0.0 {
                continue;
            }
            acc.add(ti.abs() * tj.abs() * block_covariance(model, scheme, j, i)?);
        }
    }
    Ok(acc.value())
}

/// Joint vs. product characteristic function of the block sums
/// `Y_{1,n}, …, Y_{m,n}` of simulated paths.
///
/// The standard error is the delta-method error of the complex difference,
/// `√(Var Re ψ + Var Im ψ)/√R` with influence
/// `ψ_r = J_r − Σ_j (Π_{k≠j} φ̂_k) M_{j,r}`.
pub fn newman_check(
    model: &MAModel,
    scheme: &BlockScheme,
    t_vec: &[f64],
    mc: &MCConfig,
) -> Result<NewmanCheck> {
    let m = scheme.block_count as usize;
    if t_vec.len() != m {
        return Err(Error::Dimension {
            expected: m,
            got: t_vec.len(),
        });
    }
    let rhs = newman_rhs(model, scheme, t_vec)?;
    if t_vec.iter().all(|t| *t == 0.0) {
        return Ok(NewmanCheck {
            lhs: MonteCarloEstimate::exact(0.0, mc),
            rhs,
        });
    }
    let n = scheme.n as usize;
    let draws: Vec<Vec<Complex64>> = mc_map(mc, |_, rng| {
        let path = sample_path_with(model, n, rng);
        let sums = block_sums(&path, scheme).expect("path length matches scheme");
        let mut out = Vec::with_capacity(m + 1);
        let mut phase = 0.0;
        for (t, y) in t_vec.iter().zip(&sums.blocks) {
            phase += t * y;
            out.push(Complex64::from_polar(1.0, t * y));
        }
        out.push(Complex64::from_polar(1.0, phase));
        out
    })?;
    let r = draws.len() as f64;
    let mut means = vec![Complex64::new(0.0, 0.0); m + 1];
    for d in &draws {
        for (acc, v) in means.iter_mut().zip(d) {
            *acc += v;
        }
    }
    for v in means.iter_mut() {
        *v /= r;
    }
    let joint = means[m];
    let marginals = &means[..m];
    let product: Complex64 = marginals.iter().product();
    let diff = joint - product;
    // leave-one-out products Π_{k≠j} φ̂_k
    let loo: Vec<Complex64> = (0..m)
        .map(|j| {
            marginals
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, v)| *v)
                .product()
        })
        .collect();
    let stderr = if draws.len() < 2 {
        0.0
    } else {
        let (mut s_re, mut s_im, mut q_re, mut q_im) = (0.0, 0.0, 0.0, 0.0);
        for d in &draws {
            let mut psi = d[m];
            for j in 0..m {
                psi -= loo[j] * d[j];
            }
            s_re += psi.re;
            s_im += psi.im;
            q_re += psi.re * psi.re;
            q_im += psi.im * psi.im;
        }
        let var_re = (q_re - s_re * s_re / r) / (r - 1.0);
        let var_im = (q_im - s_im * s_im / r) / (r - 1.0);
        ((var_re + var_im).max(0.0) / r).sqrt()
    };
    Ok(NewmanCheck {
        lhs: MonteCarloEstimate {
            value: diff.norm(),
            stderr,
            replicates: mc.replicates,
            master_seed: mc.master_seed,
        },
        rhs,
    })
}

/// Coupling CF product against its Gaussian counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CfProductDeviation {
    /// `|φ̂(t/s_n)^m − exp(−m t² s_p²/(2 s_n²))|`.
    pub deviation: MonteCarloEstimate,
    /// `exp(−m t² s_p²/(2 s_n²))`.
    pub gaussian_target: f64,
}

/// Since the coupling blocks are iid, a single marginal estimate raised to
/// the m-th power stands for the whole product.
pub fn cf_product_deviation(
    model: &MAModel,
    scheme: &BlockScheme,
    t: f64,
    mc: &MCConfig,
) -> Result<CfProductDeviation> {
    if !t.is_finite() {
        return Err(domain("frequency must be finite"));
    }
    let m = scheme.block_count;
    let s_n = model.partial_sum_variance(scheme.n).sqrt();
    let s_p_sq = model.partial_sum_variance(scheme.block_len);
    let gaussian_target = (-(m as f64) * t * t * s_p_sq / (2.0 * s_n * s_n)).exp();
    if t == 0.0 {
        return Ok(CfProductDeviation {
            deviation: MonteCarloEstimate::exact(0.0, mc),
            gaussian_target,
        });
    }
    let sampler = PartialSumSampler::new(model, scheme.block_len);
    let draws = mc_map(mc, |_, rng| sampler.sample(rng))?;
    let phi = empirical_cf(&draws, t / s_n)?;
    let m_i32 = i32::try_from(m).map_err(|_| domain("block count too large"))?;
    let product = phi.value.powi(m_i32);
    let deviation = (product - Complex64::new(gaussian_target, 0.0)).norm();
    let slope = m as f64 * phi.value.norm().powi(m_i32 - 1);
    let stderr = slope * phi.stderr_re.hypot(phi.stderr_im);
    Ok(CfProductDeviation {
        deviation: MonteCarloEstimate {
            value: deviation,
            stderr,
            replicates: mc.replicates,
            master_seed: mc.master_seed,
        },
        gaussian_target,
    })
}

/// Shape `m|t|^q p^{q/2}/s_n^q · exp(−m t² s_p²/(2 s_n²))` of the bound on
/// the coupling product deviation, up to its constant.
pub fn cf_product_envelope(model: &MAModel, scheme: &BlockScheme, t: f64, q: f64) -> f64 {
    let m = scheme.block_count as f64;
    let p = scheme.block_len as f64;
    let s_n_sq = model.partial_sum_variance(scheme.n);
    let s_p_sq = model.partial_sum_variance(scheme.block_len);
    let target = (-m * t * t * s_p_sq / (2.0 * s_n_sq)).exp();
    m * t.abs().powf(q) * p.powf(q / 2.0) / s_n_sq.powf(q / 2.0) * target
}

/// Smoothing-inequality bound on `sup_x |F_R(x) − Φ(x)|` for the empirical
/// law `F_R` of `samples`.
///
/// The integrand `|f̂(t) − e^{−t²/2}|/|t|` is even in t; at t = 0 it takes its
/// limit `|mean|`, which is zero for centered samples.
pub fn esseen_distance_bound(samples: &[f64], params: &SmoothingParameters) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let integrand = |t: f64| {
        if t == 0.0 {
            return mean.abs();
        }
        let diff = ecf_value(samples, t) - Complex64::new((-0.5 * t * t).exp(), 0.0);
        diff.norm() / t.abs()
    };
    let half = quadrature::integrate(integrand, 0.0, params.truncation, 1e-7, 1e-5, 4000)?;
    Ok(params.integral_constant * 2.0 * half.value + params.tail_constant / params.truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InnovationLaw;

    #[test]
    fn ecf_of_point_mass_and_zero_frequency() {
        let zeros = vec![0.0; 10];
        assert_eq!(empirical_cf(&zeros, 3.7).unwrap().value, Complex64::new(1.0, 0.0));
        let xs = [0.3, -1.2, 5.0];
        let at_zero = empirical_cf(&xs, 0.0).unwrap();
        assert_eq!(at_zero.value, Complex64::new(1.0, 0.0));
        assert_eq!(at_zero.stderr(), 0.0);
        assert!(matches!(empirical_cf(&[], 1.0), Err(Error::Empty)));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn smoothing_constants() {
        let p = SmoothingParameters::new(2.0).unwrap();
        assert!((p.integral_constant - 0.318_309_886_183_790_7).abs() < 1e-15);
        assert!((p.tail_constant - 3.047_694_524_843_567).abs() < 1e-12);
        assert!(SmoothingParameters::new(0.0).is_err());
        assert!(SmoothingParameters::for_blocks(1000, 0.5, 0.1).is_err());
        let t2 = SmoothingParameters::for_blocks(1000, 0.5, DEFAULT_LOG_EXPONENT).unwrap();
        let expect = 1000f64.ln().powf(-0.1) * 1000f64.powf(0.25);
        assert!((t2.truncation - expect).abs() < 1e-12);
    }

    #[test]
    fn iid_blocks_are_uncorrelated() {
        let m = MAModel::iid(InnovationLaw::gaussian()).unwrap();
        let s = BlockScheme::new(64, 0.5).unwrap();
        assert_eq!(block_covariance(&m, &s, 2, 1).unwrap(), 0.0);
        assert_eq!(block_covariance(&m, &s, 3, 3).unwrap(), m.partial_sum_variance(8));
        assert_eq!(block_covariance_identity(&m, &s).unwrap(), (0.0, 0.0));
        assert!(block_covariance(&m, &s, 0, 1).is_err());
        assert!(block_covariance(&m, &s, 9, 1).is_err());
    }

    #[test]
    fn adjacent_block_covariance_by_pairs() {
        let m = MAModel::geometric(0.5, 60, InnovationLaw::gaussian()).unwrap();
        let s = BlockScheme {
            n: 6,
            alpha: 0.6,
            block_len: 2,
            block_count: 3,
            remainder_len: 0,
        };
        // blocks {1,2} and {3,4}: lags 1, 2, 2, 3
        let c = |j| m.autocovariance(j);
        let pairs = c(1) + 2.0 * c(2) + c(3);
        assert!((block_covariance(&m, &s, 2, 1).unwrap() - pairs).abs() < 1e-14);
        assert!((block_covariance(&m, &s, 1, 1).unwrap() - m.partial_sum_variance(2)).abs() < 1e-14);
    }

    #[test]
    fn newman_zero_frequencies_are_exact() {
        let m = MAModel::geometric(0.5, 10, InnovationLaw::gaussian()).unwrap();
        let s = BlockScheme::new(64, 0.5).unwrap();
        let chk = newman_check(&m, &s, &[0.0; 8], &MCConfig::new(10, 1)).unwrap();
        assert_eq!(chk.lhs.value, 0.0);
        assert_eq!(chk.rhs, 0.0);
        assert!(matches!(
            newman_check(&m, &s, &[0.1; 3], &MCConfig::new(10, 1)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn cf_product_at_zero_frequency() {
        let m = MAModel::geometric(0.5, 10, InnovationLaw::exponential(1.0).unwrap()).unwrap();
        let s = BlockScheme::new(256, 0.5).unwrap();
        let d = cf_product_deviation(&m, &s, 0.0, &MCConfig::new(100, 3)).unwrap();
        assert_eq!(d.deviation.value, 0.0);
        assert_eq!(d.gaussian_target, 1.0);
    }

    #[test]
    fn degenerate_samples_bound() {
        // closed form: (2/π)∫_0^1 (1−e^{−t²/2})/t dt + 24/(π√(2π))
        let bound = esseen_distance_bound(&[0.0; 4], &SmoothingParameters::new(1.0).unwrap()).unwrap();
        let reference = quadrature::integrate(
            |t: f64| if t == 0.0 { 0.0 } else { (1.0 - (-0.5 * t * t).exp()) / t },
            0.0,
            1.0,
            1e-14,
            0.0,
            100,
        )
        .unwrap()
        .value;
        let expect = 2.0 * reference / PI + 24.0 / (PI * (2.0 * PI).sqrt());
        assert!((bound - expect).abs() < 1e-6);
        assert!(bound >= 0.5);
    }
}
