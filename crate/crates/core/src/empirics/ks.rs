use crate::error::{Error, Result};
use crate::special::normal_cdf;

/// 99th percentile of the Kolmogorov distribution: `P(√R·D_R > 1.628) ≈ 0.01`.
pub const KOLMOGOROV_Q99: f64 = 1.628;

/// Kolmogorov distance between the empirical law of `samples` and Φ.
pub fn ks_distance(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(ks_distance_sorted(&xs))
}

pub(crate) fn ks_distance_sorted(xs: &[f64]) -> f64 {
    let r = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = normal_cdf(x);
        let above = (i + 1) as f64 / r - f;
        let below = f - i as f64 / r;
        d.max(above.abs()).max(below.abs())
    })
}

/// Two-sample Kolmogorov–Smirnov distance `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// 99% noise floor of the one-sample statistic at `r` replicates.
pub fn ks_noise_floor(r: u64) -> f64 {
    KOLMOGOROV_Q99 / (r as f64).sqrt()
}

/// 99% noise floor of the two-sample statistic.
pub fn ks_two_sample_noise_floor(ra: u64, rb: u64) -> f64 {
    let (a, b) = (ra as f64, rb as f64);
    KOLMOGOROV_Q99 * ((a + b) / (a * b)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_zero_sample() {
        assert_eq!(ks_distance(&[0.0]).unwrap(), 0.5);
        assert!(matches!(ks_distance(&[]), Err(Error::Empty)));
    }

    #[test]
    fn two_sample_edge_cases() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.5);
        // ties across samples resolve before comparing
        assert_eq!(ks_two_sample(&[1.0, 1.0, 2.0], &[1.0, 2.0, 2.0]).unwrap(), 1.0 / 3.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn floors() {
        assert!((ks_noise_floor(10_000) - 0.01628).abs() < 1e-12);
        assert!((ks_two_sample_noise_floor(100, 100) - 1.628 * 0.02f64.sqrt()).abs() < 1e-12);
    }
}
