//! Monte Carlo experiments on normalized partial sums: Kolmogorov distance to
//! Φ and its decay in n, coupling distance, remainder tails, moderate
//! deviation ratios and the moment conditions for coupling-block moderate
//! deviations.
//!
//! Partial sums are always normalized by the exact `s_n` from the covariance
//! algebra, never by an estimated variance.

mod ks;

pub use ks::{
    ks_distance, ks_noise_floor, ks_two_sample, ks_two_sample_noise_floor, KOLMOGOROV_Q99,
};

use crate::error::{domain, Error, Result};
use crate::model::{DecayFit, MAModel};
use crate::rates;
use crate::simulate::{
    estimate_from, mc_map, BlockScheme, MCConfig, MonteCarloEstimate, PartialSumSampler,
};
use crate::special::{loglog_fit, mean_and_stderr, normal_sf};
use serde::Serialize;

/// Knobs of [`clt_rate_experiment_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateOptions {
    /// Replicates per n are split into this many equal batches; the reported
    /// distance is the mean of the per-batch Kolmogorov distances.
    pub batches: u64,
    /// Moment order for the theoretical exponent; defaults to the
    /// innovation law's [`default_moment_order`](crate::model::InnovationLaw::default_moment_order).
    pub q: Option<f64>,
    /// Decay exponent θ; defaults to the fitted one of the model.
    pub theta: Option<f64>,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            batches: 1,
            q: None,
            theta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateExperimentResult {
    pub n_grid: Vec<u64>,
    /// Kolmogorov distance of `S_n/s_n` to Φ, one per n.
    pub distances: Vec<f64>,
    /// Standard error of each distance across batches (0 with one batch).
    pub distance_stderr: Vec<f64>,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    /// Replicates per n (all batches together).
    pub replicates: u64,
    pub batches: u64,
    /// 99% noise floor of a single batch's distance.
    pub noise_floor: f64,
    pub q: f64,
    /// `None` when the model is independent (θ = ∞).
    pub theta: Option<f64>,
    pub theoretical_exponent: f64,
    /// `S_n` is exactly normal (Gaussian innovations).
    pub exact_normal: bool,
}

fn resolve_theory(model: &MAModel, q: Option<f64>, theta: Option<f64>) -> Result<(f64, Option<f64>, f64)> {
    let law = model.innovation();
    let q = q.unwrap_or_else(|| law.default_moment_order());
    law.check_moment(q)?;
    let theta = match theta {
        Some(t) => Some(t),
        None => match model.profile()?.theta {
            DecayFit::Exponent(t) => Some(t),
            DecayFit::Exact | DecayFit::Vanishing => None,
        },
    };
    let exponent = match theta {
        Some(t) => rates::clt_rate_exponent(q, t)?.exponent,
        None => rates::clt_rate_exponent_limit(q)?,
    };
    Ok((q, theta, exponent))
}

/// Normalized partial sums `S_n/s_n`, one per replicate.
pub fn normalized_sums(model: &MAModel, n: u64, mc: &MCConfig) -> Result<Vec<f64>> {
    let s_n = model.partial_sum_variance(n).sqrt();
    let sampler = PartialSumSampler::new(model, n);
    mc_map(mc, |_, rng| sampler.sample(rng) / s_n)
}

pub fn clt_rate_experiment(model: &MAModel, n_grid: &[u64], mc: &MCConfig) -> Result<RateExperimentResult> {
    clt_rate_experiment_with(model, n_grid, mc, &RateOptions::default())
}

pub fn clt_rate_experiment_with(
    model: &MAModel,
    n_grid: &[u64],
    mc: &MCConfig,
    opts: &RateOptions,
) -> Result<RateExperimentResult> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("n grid must be nonempty and strictly increasing"));
    }
    if n_grid[0] < 16 {
        return Err(domain("rate experiments need n >= 16"));
    }
    if opts.batches == 0 || opts.batches > mc.replicates {
        return Err(Error::Config(format!(
            "batch count {} must lie in 1..={}",
            opts.batches, mc.replicates
        )));
    }
    let (q, theta, theoretical_exponent) = resolve_theory(model, opts.q, opts.theta)?;
    let batch_len = (mc.replicates / opts.batches) as usize;
    let mut distances = Vec::with_capacity(n_grid.len());
    let mut distance_stderr = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let draws = normalized_sums(model, n, &mc.derived(n))?;
        let per_batch: Vec<f64> = draws
            .chunks_exact(batch_len)
            .take(opts.batches as usize)
            .map(ks_distance)
            .collect::<Result<_>>()?;
        let (d, se) = mean_and_stderr(&per_batch);
        distances.push(d);
        distance_stderr.push(se);
    }
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let fit = loglog_fit(&xs, &distances);
    Ok(RateExperimentResult {
        n_grid: n_grid.to_vec(),
        fitted_slope: fit.map_or(f64::NAN, |f| f.slope),
        fitted_intercept: fit.map_or(f64::NAN, |f| f.intercept),
        distances,
        distance_stderr,
        replicates: mc.replicates,
        batches: opts.batches,
        noise_floor: ks_noise_floor(batch_len as u64),
        q,
        theta,
        theoretical_exponent,
        exact_normal: model.innovation().is_symmetric(),
    })
}

/// Draws of `Σ_j Y_{j,n}/s_n` and of `Σ_j Y*_{j,n}/s_n`.
pub fn coupling_samples(model: &MAModel, scheme: &BlockScheme, mc: &MCConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let s_n = model.partial_sum_variance(scheme.n).sqrt();
    let blocked = PartialSumSampler::new(model, scheme.block_count * scheme.block_len);
    let single = PartialSumSampler::new(model, scheme.block_len);
    let dependent = mc_map(&mc.derived(1), |_, rng| blocked.sample(rng) / s_n)?;
    let coupled = mc_map(&mc.derived(2), |_, rng| {
        let mut acc = 0.0;
        for _ in 0..scheme.block_count {
            acc += single.sample(rng);
        }
        acc / s_n
    })?;
    Ok((dependent, coupled))
}

/// Two-sample Kolmogorov distance between the dependent block sum and the
/// coupling block sum, both over `s_n`.
pub fn coupling_distance(model: &MAModel, scheme: &BlockScheme, mc: &MCConfig) -> Result<f64> {
    let (a, b) = coupling_samples(model, scheme, mc)?;
    ks_two_sample(&a, &b)
}

/// `P(|Y_{m+1,n}| > n^{−3α/8} s_n)`. The remainder block has the law of
/// `S_{n−mp}` by stationarity.
pub fn remainder_tail(model: &MAModel, scheme: &BlockScheme, mc: &MCConfig) -> Result<MonteCarloEstimate> {
    mc.validate()?;
    if scheme.remainder_len == 0 {
        return Ok(MonteCarloEstimate::exact(0.0, mc));
    }
    let threshold = remainder_threshold(model, scheme);
    let sampler = PartialSumSampler::new(model, scheme.remainder_len);
    let hits = mc_map(mc, |_, rng| f64::from(u8::from(sampler.sample(rng).abs() > threshold)))?;
    Ok(estimate_from(&hits, mc))
}

/// `n^{−3α/8} s_n`.
pub fn remainder_threshold(model: &MAModel, scheme: &BlockScheme) -> f64 {
    (scheme.n as f64).powf(-3.0 * scheme.alpha / 8.0) * model.partial_sum_variance(scheme.n).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModDevEstimate {
    /// `P(S_n > x_n s_n) / (1 − Φ(x_n))`.
    pub ratio: MonteCarloEstimate,
    pub x_n: f64,
    /// `1 − Φ(x_n)`.
    pub normal_tail: f64,
    pub exceedances: u64,
    /// λ < (q_max − 2)/2 for the innovation law.
    pub in_regime: bool,
}

/// Minimum expected exceedance count for [`moddev_ratio`].
pub const MIN_EXPECTED_EXCEEDANCES: f64 = 100.0;

/// Moderate deviation ratio at `x_n = √(λ log n)`.
pub fn moddev_ratio(model: &MAModel, n: u64, lambda: f64, mc: &MCConfig) -> Result<ModDevEstimate> {
    mc.validate()?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    if n < 2 {
        return Err(domain("moderate deviations need n >= 2"));
    }
    let x_n = (lambda * (n as f64).ln()).sqrt();
    let normal_tail = normal_sf(x_n);
    let expected = mc.replicates as f64 * normal_tail;
    if expected < MIN_EXPECTED_EXCEEDANCES {
        return Err(Error::Precision(format!(
            "only {expected:.1} exceedances expected at {} replicates; need at least {} (use R >= {:.0})",
            mc.replicates,
            MIN_EXPECTED_EXCEEDANCES,
            (MIN_EXPECTED_EXCEEDANCES / normal_tail).ceil()
        )));
    }
    let s_n = model.partial_sum_variance(n).sqrt();
    let level = x_n * s_n;
    let sampler = PartialSumSampler::new(model, n);
    let hits = mc_map(mc, |_, rng| f64::from(u8::from(sampler.sample(rng) > level)))?;
    let exceedances = hits.iter().filter(|h| **h > 0.0).count() as u64;
    let p = estimate_from(&hits, mc);
    Ok(ModDevEstimate {
        ratio: MonteCarloEstimate {
            value: p.value / normal_tail,
            stderr: p.stderr / normal_tail,
            ..p
        },
        x_n,
        normal_tail,
        exceedances,
        in_regime: lambda < (model.innovation().q_max() - 2.0) / 2.0,
    })
}

/// Truncation levels δ at which the lower-tail functional is evaluated.
pub const FROLOV_DELTAS: [f64; 2] = [0.5, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerTailValue {
    pub delta: f64,
    pub value: MonteCarloEstimate,
}

/// Moment and truncation quantities of the coupling-block array at one n.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrolovDiagnostics {
    pub scheme: BlockScheme,
    pub q: f64,
    pub lambda: f64,
    /// `x_n = √(λ log n)`
    pub x_n: f64,
    /// `B_n = m_n s_{p_n}²`, exact.
    pub b_n: f64,
    /// `M_n = m_n E[(Y⁺)^q]`.
    pub m_n: MonteCarloEstimate,
    /// `L_n = M_n / B_n^{q/2}`.
    pub l_n: f64,
    /// `Λ_n(x⁴, x⁵, δ) = (x⁴/B_n) m_n E[Y² 1{Y < −δ√B_n/x⁵}]` at `x = x_n`.
    pub lambda_fn: Vec<LowerTailValue>,
    /// `x_n² − 2 log(1/L_n) − (q−1) log log(1/L_n)`; `None` when `L_n ≥ 1`.
    pub e6: Option<f64>,
}

pub fn frolov_diagnostics(
    model: &MAModel,
    scheme: &BlockScheme,
    q: f64,
    lambda: f64,
    mc: &MCConfig,
) -> Result<FrolovDiagnostics> {
    mc.validate()?;
    model.innovation().check_moment(q)?;
    if !(q > 2.0) {
        return Err(domain(format!("moment order q must exceed 2, got {q}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    let m = scheme.block_count as f64;
    let b_n = m * model.partial_sum_variance(scheme.block_len);
    let x_n = (lambda * (scheme.n as f64).ln()).sqrt();
    let sampler = PartialSumSampler::new(model, scheme.block_len);
    let draws = mc_map(mc, |_, rng| sampler.sample(rng))?;

    let pos_moments: Vec<f64> = draws.iter().map(|y| y.max(0.0).powf(q)).collect();
    let beta = estimate_from(&pos_moments, mc);
    let m_n = MonteCarloEstimate {
        value: m * beta.value,
        stderr: m * beta.stderr,
        ..beta
    };
    let l_n = m_n.value / b_n.powf(q / 2.0);

    let lambda_fn = FROLOV_DELTAS
        .iter()
        .map(|&delta| {
            if x_n == 0.0 {
                return LowerTailValue {
                    delta,
                    value: MonteCarloEstimate::exact(0.0, mc),
                };
            }
            let cut = -delta * b_n.sqrt() / x_n.powi(5);
            let scale = x_n.powi(4) * m / b_n;
            let terms: Vec<f64> = draws
                .iter()
                .map(|y| if *y < cut { scale * y * y } else { 0.0 })
                .collect();
            LowerTailValue {
                delta,
                value: estimate_from(&terms, mc),
            }
        })
        .collect();

    let e6 = (l_n > 0.0 && l_n < 1.0).then(|| {
        let inv = (1.0 / l_n).ln();
        x_n * x_n - 2.0 * inv - (q - 1.0) * inv.ln()
    });
    Ok(FrolovDiagnostics {
        scheme: *scheme,
        q,
        lambda,
        x_n,
        b_n,
        m_n,
        l_n,
        lambda_fn,
        e6,
    })
}

/// [`frolov_diagnostics`] along a grid of n at fixed α.
pub fn frolov_sweep(
    model: &MAModel,
    alpha: f64,
    n_grid: &[u64],
    q: f64,
    lambda: f64,
    mc: &MCConfig,
) -> Result<Vec<FrolovDiagnostics>> {
    n_grid
        .iter()
        .map(|&n| {
            let scheme = BlockScheme::new(n, alpha)?;
            frolov_diagnostics(model, &scheme, q, lambda, &mc.derived(n))
        })
        .collect()
}

/// Slope of log L_n against log n.
pub fn l_n_slope(diags: &[FrolovDiagnostics]) -> Option<f64> {
    let xs: Vec<f64> = diags.iter().map(|d| d.scheme.n as f64).collect();
    let ys: Vec<f64> = diags.iter().map(|d| d.l_n).collect();
    loglog_fit(&xs, &ys).map(|f| f.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InnovationLaw;

    #[test]
    fn remainder_without_tail_is_exactly_zero() {
        let m = MAModel::iid(InnovationLaw::gaussian()).unwrap();
        let s = BlockScheme::new(1024, 0.5).unwrap();
        let p = remainder_tail(&m, &s, &MCConfig::new(10, 1)).unwrap();
        assert_eq!(p.value, 0.0);
        assert_eq!(p.stderr, 0.0);
    }

    #[test]
    fn moddev_requires_enough_exceedances() {
        let m = MAModel::iid(InnovationLaw::gaussian()).unwrap();
        let e = moddev_ratio(&m, 100_000, 2.0, &MCConfig::new(1000, 1));
        assert!(matches!(e, Err(Error::Precision(_))));
    }

    #[test]
    fn frolov_refuses_missing_moments() {
        let m = MAModel::iid(InnovationLaw::pareto(2.5).unwrap()).unwrap();
        let s = BlockScheme::new(256, 0.5).unwrap();
        let e = frolov_diagnostics(&m, &s, 3.0, 0.1, &MCConfig::new(10, 1));
        assert!(matches!(e, Err(Error::Moment { .. })));
    }

    #[test]
    fn rate_experiment_rejects_small_n() {
        let m = MAModel::iid(InnovationLaw::gaussian()).unwrap();
        assert!(clt_rate_experiment(&m, &[8, 16], &MCConfig::new(10, 1)).is_err());
        assert!(clt_rate_experiment(&m, &[32, 16], &MCConfig::new(10, 1)).is_err());
        let pareto = MAModel::iid(InnovationLaw::pareto(2.5).unwrap()).unwrap();
        let opts = RateOptions {
            q: Some(3.0),
            ..RateOptions::default()
        };
        assert!(matches!(
            clt_rate_experiment_with(&pareto, &[16, 32], &MCConfig::new(10, 1), &opts),
            Err(Error::Moment { .. })
        ));
    }
}
