//! Normal distribution functions, compensated summation and small regression helpers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function Φ.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(x), evaluated through erfc so it keeps full relative
/// accuracy deep in the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// E[(Z⁺)^q] for a standard normal Z: 2^{q/2−1} Γ((q+1)/2) / √π.
pub fn half_normal_moment(q: f64) -> f64 {
    2f64.powf(q / 2.0 - 1.0) * libm::tgamma((q + 1.0) / 2.0) / PI.sqrt()
}

/// E[Z² 1{Z < −u}] for a standard normal Z.
pub fn normal_lower_second_moment(u: f64) -> f64 {
    u * normal_pdf(u) + normal_sf(u)
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Ordinary least squares line y = intercept + slope·x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least squares fit of `ys` against `xs`. Needs at least two distinct abscissae.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Fit of log y against log x. Every value must be strictly positive.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Mean and unbiased standard error of the mean, accumulated in slice order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let var = ss / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-15);
        // 1 − Φ(10) from a high precision table
        let tail = 7.619853024160527e-24;
        assert!((normal_sf(10.0) / tail - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_normal_moment_matches_known_orders() {
        // E[(Z⁺)²] = 1/2, E[(Z⁺)] = 1/√(2π)
        assert!((half_normal_moment(2.0) - 0.5).abs() < 1e-14);
        assert!((half_normal_moment(1.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-14);
        // E[(Z⁺)⁴] = 3/2
        assert!((half_normal_moment(4.0) - 1.5).abs() < 1e-13);
    }

    #[test]
    fn lower_second_moment_limits() {
        assert!((normal_lower_second_moment(0.0) - 0.5).abs() < 1e-15);
        assert!(normal_lower_second_moment(40.0) < 1e-300);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1.0];
        xs.extend(std::iter::repeat_n(1e-16, 10_000));
        let s = compensated_sum(xs.iter().copied());
        assert!((s - (1.0 + 1e-12)).abs() < 1e-18);
    }

    #[test]
    fn loglog_fit_recovers_power() {
        let xs: Vec<f64> = (1..10).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.75)).collect();
        let fit = loglog_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(loglog_fit(&[1.0, 2.0], &[0.0, 1.0]).is_none());
    }
}
