//! Stationary associated sequences built as moving averages with nonnegative
//! weights over iid centered innovations.
//!
//! With `X_t = Σ_{k=0}^{K} a_k Z_{t−k}` and `a_k ≥ 0`, every `X_t` is a
//! nondecreasing function of independent innovations, so the sequence is
//! associated. All second-order quantities are finite sums over the weights
//! and are computed exactly (up to compensated floating point summation).

use crate::error::{domain, Error, Result};
use crate::special::{loglog_fit, KahanSum};
use rand::{Rng, RngExt};
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

/// Law of the iid innovations, always centered to mean zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InnovationLaw {
    StandardGaussian,
    /// `E − 1/rate` with `E ~ Exp(rate)`.
    CenteredExponential { rate: f64 },
    /// `P − β/(β−1)` with `P` Pareto of scale 1 and tail index `β > 2`.
    CenteredPareto { tail_index: f64 },
}

impl InnovationLaw {
    pub fn gaussian() -> Self {
        InnovationLaw::StandardGaussian
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let law = InnovationLaw::CenteredExponential { rate };
        law.validate()?;
        Ok(law)
    }

    pub fn pareto(tail_index: f64) -> Result<Self> {
        let law = InnovationLaw::CenteredPareto { tail_index };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationLaw::StandardGaussian => Ok(()),
            InnovationLaw::CenteredExponential { rate } => {
                if rate.is_finite() && rate > 0.0 {
                    Ok(())
                } else {
                    Err(domain(format!("exponential rate must be positive, got {rate}")))
                }
            }
            InnovationLaw::CenteredPareto { tail_index } => {
                if tail_index.is_finite() && tail_index > 2.0 {
                    Ok(())
                } else {
                    Err(domain(format!(
                        "pareto tail index must exceed 2 for a finite variance, got {tail_index}"
                    )))
                }
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            InnovationLaw::StandardGaussian => 1.0,
            InnovationLaw::CenteredExponential { rate } => 1.0 / (rate * rate),
            InnovationLaw::CenteredPareto { tail_index: b } => b / ((b - 1.0) * (b - 1.0) * (b - 2.0)),
        }
    }

    /// Supremum of the finite absolute moment orders.
    pub fn q_max(&self) -> f64 {
        match *self {
            InnovationLaw::CenteredPareto { tail_index } => tail_index,
            _ => f64::INFINITY,
        }
    }

    /// Refuses moment orders the law does not have.
    pub fn check_moment(&self, q: f64) -> Result<()> {
        if q >= self.q_max() {
            Err(Error::Moment {
                requested: q,
                q_max: self.q_max(),
            })
        } else {
            Ok(())
        }
    }

    /// Moment order used for rate computations when none is given: 3 when the
    /// third moment exists (rates do not improve past q = 3), otherwise the
    /// midpoint of (2, q_max).
    pub fn default_moment_order(&self) -> f64 {
        let q_max = self.q_max();
        if q_max > 3.0 {
            3.0
        } else {
            0.5 * (2.0 + q_max)
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, InnovationLaw::StandardGaussian)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InnovationLaw::StandardGaussian => StandardNormal.sample(rng),
            InnovationLaw::CenteredExponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                (e - 1.0) / rate
            }
            InnovationLaw::CenteredPareto { tail_index: b } => {
                // 1 − U lies in (0, 1]
                let u: f64 = 1.0 - rng.random::<f64>();
                u.powf(-1.0 / b) - b / (b - 1.0)
            }
        }
    }

    /// Sum of `count` iid innovations, drawn exactly in law. Gaussian and
    /// exponential sums use their closed convolution families; Pareto sums
    /// are accumulated term by term.
    pub fn sample_sum<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> f64 {
        if count == 0 {
            return 0.0;
        }
        match *self {
            InnovationLaw::StandardGaussian => {
                let z: f64 = StandardNormal.sample(rng);
                (count as f64).sqrt() * z
            }
            InnovationLaw::CenteredExponential { rate } => {
                let shape = count as f64;
                if count == 1 {
                    let e: f64 = Exp1.sample(rng);
                    return (e - 1.0) / rate;
                }
                let g = Gamma::new(shape, 1.0).expect("positive gamma shape");
                (g.sample(rng) - shape) / rate
            }
            InnovationLaw::CenteredPareto { .. } => {
                let mut acc = 0.0;
                for _ in 0..count {
                    acc += self.sample(rng);
                }
                acc
            }
        }
    }
}

/// `(1, ρ, ρ², …, ρ^K)`.
pub fn geometric_weights(rho: f64, k: usize) -> Result<Vec<f64>> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(domain(format!("geometric ratio must lie in (0, 1), got {rho}")));
    }
    Ok((0..=k).map(|i| rho.powi(i as i32)).collect())
}

/// `a_k = (k+1)^{−β}` for `k = 0..=K`.
pub fn power_weights(beta: f64, k: usize) -> Result<Vec<f64>> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(domain(format!("power exponent must exceed 1, got {beta}")));
    }
    Ok((0..=k).map(|i| ((i + 1) as f64).powf(-beta)).collect())
}

/// Fitted polynomial decay of a residual sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum DecayFit {
    /// The residual vanishes identically on the grid (independent sequence).
    Exact,
    /// The residual is positive on part of the grid and exactly zero beyond
    /// the weight truncation: decay faster than any power.
    Vanishing,
    /// Negated log-log slope.
    Exponent(f64),
}

impl DecayFit {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            DecayFit::Exponent(e) => Some(*e),
            _ => None,
        }
    }
}

/// Second-order summary of a model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceProfile {
    pub sigma1_sq: f64,
    /// `c_0, c_1, …, c_K`; `c_j = 0` for `j > K`.
    pub autocov: Vec<f64>,
    pub sigma_sq: f64,
    pub theta: DecayFit,
    pub delta: DecayFit,
}

impl CovarianceProfile {
    pub fn autocovariance(&self, j: usize) -> f64 {
        self.autocov.get(j).copied().unwrap_or(0.0)
    }
}

/// Moving average with nonnegative weights over iid innovations.
#[derive(Clone, Debug, PartialEq)]
pub struct MAModel {
    weights: Vec<f64>,
    innovation: InnovationLaw,
    autocov: Vec<f64>,
}

/// Grid used by [`MAModel::profile`] when fitting decay exponents.
pub const DEFAULT_DECAY_GRID: [u64; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

impl MAModel {
    pub fn new(weights: Vec<f64>, innovation: InnovationLaw) -> Result<Self> {
        innovation.validate()?;
        if weights.is_empty() {
            return Err(domain("weight sequence is empty"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(domain("weights must be finite and nonnegative"));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(domain("at least one weight must be strictly positive"));
        }
        let var = innovation.variance();
        let k = weights.len() - 1;
        let autocov = (0..=k)
            .map(|j| {
                let mut acc = KahanSum::new();
                for i in 0..=(k - j) {
                    acc.add(weights[i] * weights[i + j]);
                }
                var * acc.value()
            })
            .collect();
        Ok(MAModel {
            weights,
            innovation,
            autocov,
        })
    }

    pub fn iid(innovation: InnovationLaw) -> Result<Self> {
        MAModel::new(vec![1.0], innovation)
    }

    pub fn geometric(rho: f64, k: usize, innovation: InnovationLaw) -> Result<Self> {
        MAModel::new(geometric_weights(rho, k)?, innovation)
    }

    pub fn power(beta: f64, k: usize, innovation: InnovationLaw) -> Result<Self> {
        MAModel::new(power_weights(beta, k)?, innovation)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn innovation(&self) -> &InnovationLaw {
        &self.innovation
    }

    /// Truncation lag K.
    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().copied().collect::<KahanSum>().value()
    }

    /// `c_j = Cov(X_1, X_{1+j})`.
    pub fn autocovariance(&self, j: u64) -> f64 {
        usize::try_from(j)
            .ok()
            .and_then(|j| self.autocov.get(j).copied())
            .unwrap_or(0.0)
    }

    pub fn autocovariances(&self) -> &[f64] {
        &self.autocov
    }

    pub fn sigma1_sq(&self) -> f64 {
        self.autocov[0]
    }

    /// `s_n² = E S_n² = n σ₁² + 2 Σ_{j=1}^{n−1} (n−j) c_j`.
    pub fn partial_sum_variance(&self, n: u64) -> f64 {
        assert!(n >= 1, "partial sums need n >= 1");
        let mut acc = KahanSum::new();
        acc.add(n as f64 * self.autocov[0]);
        let last = (n - 1).min(self.order() as u64) as usize;
        for j in 1..=last {
            acc.add(2.0 * (n - j as u64) as f64 * self.autocov[j]);
        }
        acc.value()
    }

    /// Cox–Grimmett coefficient `u(n) = Σ_{j≥n} c_j`.
    pub fn cox_grimmett(&self, n: u64) -> f64 {
        let k = self.order() as u64;
        if n > k {
            return 0.0;
        }
        let mut acc = KahanSum::new();
        for j in (n as usize..=self.order()).rev() {
            acc.add(self.autocov[j]);
        }
        acc.value()
    }

    /// `σ² = σ₁² + 2 Σ_{j≥1} c_j`, cross-checked against `Var(Z)·(Σ a_k)²`.
    pub fn long_run_variance(&self) -> Result<f64> {
        let mut acc = KahanSum::new();
        acc.add(self.autocov[0]);
        for c in &self.autocov[1..] {
            acc.add(2.0 * c);
        }
        let by_covariances = acc.value();
        let a = self.weight_sum();
        let by_weights = self.innovation.variance() * a * a;
        let rel = (by_covariances - by_weights).abs() / by_weights.abs();
        if rel > 1e-10 {
            return Err(Error::Consistency(format!(
                "long-run variance mismatch: covariance sum {by_covariances} vs weight formula {by_weights}"
            )));
        }
        Ok(by_covariances)
    }

    /// Both sides of `σ² − s_n²/n = 2u(n) + (2/n) Σ_{j=1}^{n−1} j c_j`.
    pub fn variance_gap_identity(&self, n: u64) -> Result<(f64, f64)> {
        let sigma_sq = self.long_run_variance()?;
        let lhs = sigma_sq - self.partial_sum_variance(n) / n as f64;
        let last = (n - 1).min(self.order() as u64) as usize;
        let mut weighted = KahanSum::new();
        for j in 1..=last {
            weighted.add(j as f64 * self.autocov[j]);
        }
        let rhs = 2.0 * self.cox_grimmett(n) + 2.0 * weighted.value() / n as f64;
        Ok((lhs, rhs))
    }

    /// Fits the decay exponents of `|s_n²/(nσ²) − 1|` (θ) and `u(n)` (δ)
    /// over an increasing grid of at least four sizes.
    pub fn decay_exponents(&self, n_grid: &[u64]) -> Result<(DecayFit, DecayFit)> {
        if n_grid.len() < 4 {
            return Err(domain("decay fit needs at least four grid points"));
        }
        if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
            return Err(domain("decay grid must be positive and strictly increasing"));
        }
        let sigma_sq = self.long_run_variance()?;
        let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
        // Residual computed through the gap identity to avoid cancellation.
        let resid: Vec<f64> = n_grid
            .iter()
            .map(|&n| self.variance_gap_identity(n).map(|(_, rhs)| rhs / sigma_sq))
            .collect::<Result<_>>()?;
        let tails: Vec<f64> = n_grid.iter().map(|&n| self.cox_grimmett(n)).collect();
        Ok((fit_decay(&xs, &resid), fit_decay(&xs, &tails)))
    }

    /// Profile with decay exponents fitted on [`DEFAULT_DECAY_GRID`].
    pub fn profile(&self) -> Result<CovarianceProfile> {
        let (theta, delta) = self.decay_exponents(&DEFAULT_DECAY_GRID)?;
        Ok(CovarianceProfile {
            sigma1_sq: self.sigma1_sq(),
            autocov: self.autocov.clone(),
            sigma_sq: self.long_run_variance()?,
            theta,
            delta,
        })
    }
}

fn fit_decay(xs: &[f64], ys: &[f64]) -> DecayFit {
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if scale == 0.0 {
        return DecayFit::Exact;
    }
    if ys.iter().any(|y| *y <= 0.0) {
        return DecayFit::Vanishing;
    }
    match loglog_fit(xs, ys) {
        Some(fit) => DecayFit::Exponent(-fit.slope),
        None => DecayFit::Vanishing,
    }
}
