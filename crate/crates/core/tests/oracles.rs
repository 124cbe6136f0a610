//! Exact second-order quantities against an independent computation that
//! expands every sum into its innovation coefficients.

use associated_clt::charfn::{block_covariance, block_covariance_identity, newman_rhs};
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::{BlockScheme, PartialSumSampler};
use proptest::prelude::*;
use std::collections::BTreeMap;

/// Coefficient of each innovation `Z_s` in `Σ_{t=lo}^{hi} X_t`.
fn coefficients(w: &[f64], lo: i64, hi: i64) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    for t in lo..=hi {
        for (k, a) in w.iter().enumerate() {
            *out.entry(t - k as i64).or_insert(0.0) += a;
        }
    }
    out
}

fn covariance(model: &MAModel, a: (i64, i64), b: (i64, i64)) -> f64 {
    let w = model.weights();
    let ca = coefficients(w, a.0, a.1);
    let cb = coefficients(w, b.0, b.1);
    let dot: f64 = ca.iter().map(|(s, x)| x * cb.get(s).unwrap_or(&0.0)).sum();
    model.innovation().variance() * dot
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn law_strategy() -> impl Strategy<Value = InnovationLaw> {
    prop_oneof![
        Just(InnovationLaw::gaussian()),
        (0.3f64..4.0).prop_map(|r| InnovationLaw::exponential(r).unwrap()),
        (2.1f64..8.0).prop_map(|b| InnovationLaw::pareto(b).unwrap()),
    ]
}

fn model_strategy() -> impl Strategy<Value = MAModel> {
    (prop::collection::vec(0.0f64..2.0, 1..14), law_strategy()).prop_map(|(mut w, law)| {
        w[0] += 0.1;
        MAModel::new(w, law).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn autocovariances_match_expansion(model in model_strategy(), j in 0i64..20) {
        let expect = covariance(&model, (1, 1), (1 + j, 1 + j));
        let got = model.autocovariance(j as u64);
        prop_assert!((got - expect).abs() <= 1e-12 * model.sigma1_sq());
    }

    #[test]
    fn partial_sum_variance_matches_expansion(model in model_strategy(), n in 1i64..300) {
        let expect = covariance(&model, (1, n), (1, n));
        prop_assert!(rel(model.partial_sum_variance(n as u64), expect) < 1e-12);
        let sampler = PartialSumSampler::new(&model, n as u64);
        prop_assert!(rel(sampler.variance(), expect) < 1e-12);
    }

    #[test]
    fn long_run_variance_is_squared_weight_sum(model in model_strategy()) {
        let a: f64 = model.weights().iter().sum();
        prop_assert!(rel(model.long_run_variance().unwrap(), model.innovation().variance() * a * a) < 1e-12);
    }

    #[test]
    fn variance_gap_identity(model in model_strategy(), n in 1u64..2000) {
        let (lhs, rhs) = model.variance_gap_identity(n).unwrap();
        if model.order() == 0 {
            // both sides vanish; lhs is σ² − s_n²/n in floating point
            prop_assert_eq!(rhs, 0.0);
            prop_assert!(lhs.abs() <= 1e-12 * model.long_run_variance().unwrap());
        } else {
            prop_assert!(rel(lhs, rhs) < 1e-10, "lhs {lhs} rhs {rhs}");
        }
        // independent evaluation of the right side
        let c: Vec<f64> = (0..=model.order() as u64 + 1).map(|j| covariance(&model, (1, 1), (1 + j as i64, 1 + j as i64))).collect();
        let u: f64 = c.iter().skip(n as usize).sum();
        let weighted: f64 = c.iter().enumerate().take(n as usize).skip(1).map(|(j, cj)| j as f64 * cj).sum();
        let oracle = 2.0 * u + 2.0 / n as f64 * weighted;
        prop_assert!((rhs - oracle).abs() <= 1e-12 * model.long_run_variance().unwrap());
    }

    #[test]
    fn cox_grimmett_is_tail_sum(model in model_strategy(), n in 0u64..20) {
        let tail: f64 = (n..=model.order() as u64).map(|j| model.autocovariance(j)).sum();
        prop_assert!((model.cox_grimmett(n) - tail).abs() <= 1e-12 * model.sigma1_sq() * 20.0);
    }

    #[test]
    fn block_covariances_match_expansion(model in model_strategy(), n in 20u64..400, alpha in 0.2f64..0.8) {
        let Ok(scheme) = BlockScheme::new(n, alpha) else { return Ok(()) };
        let p = scheme.block_len as i64;
        let m = scheme.block_count;
        for (j, k) in [(1, 1), (1, 2), (2, m), (m, m)] {
            if j > m || k > m { continue; }
            let a = ((j as i64 - 1) * p + 1, j as i64 * p);
            let b = ((k as i64 - 1) * p + 1, k as i64 * p);
            let expect = covariance(&model, a, b);
            let got = block_covariance(&model, &scheme, j, k).unwrap();
            prop_assert!((got - expect).abs() <= 1e-12 * model.partial_sum_variance(p as u64));
        }
        let (lhs, rhs) = block_covariance_identity(&model, &scheme).unwrap();
        if model.order() == 0 {
            // both sides vanish; rhs is a difference of O(s_n²) terms
            prop_assert_eq!(lhs, 0.0);
            prop_assert!(rhs.abs() <= 1e-12 * model.partial_sum_variance(n));
        } else {
            prop_assert!(rel(lhs, rhs) < 1e-10);
        }
    }

    #[test]
    fn newman_rhs_matches_brute_force(model in model_strategy(), n in 20u64..200, seed in 0u64..1000) {
        let scheme = BlockScheme::new(n, 0.5).unwrap();
        let m = scheme.block_count as usize;
        let p = scheme.block_len as i64;
        let t: Vec<f64> = (0..m).map(|i| ((seed + 7 * i as u64) % 13) as f64 / 6.0 - 1.0).collect();
        let mut brute = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                let a = (i as i64 * p + 1, (i as i64 + 1) * p);
                let b = (j as i64 * p + 1, (j as i64 + 1) * p);
                brute += t[i].abs() * t[j].abs() * covariance(&model, a, b);
            }
        }
        let got = newman_rhs(&model, &scheme, &t).unwrap();
        prop_assert!((got - brute).abs() <= 1e-11 * (1.0 + brute.abs()));
    }
}

#[test]
fn geometric_closed_forms() {
    for (rho, k) in [(0.5, 48), (0.3, 5), (0.9, 60)] {
        let m = MAModel::geometric(rho, k, InnovationLaw::gaussian()).unwrap();
        for j in 0..=k {
            let expect = rho.powi(j as i32) * (1.0 - rho.powi(2 * (k - j + 1) as i32)) / (1.0 - rho * rho);
            assert!(rel(m.autocovariance(j as u64), expect) < 1e-12, "rho {rho} j {j}");
        }
        assert_eq!(m.autocovariance(k as u64 + 1), 0.0);
        let a = (1.0 - rho.powi(k as i32 + 1)) / (1.0 - rho);
        assert!(rel(m.long_run_variance().unwrap(), a * a) < 1e-12);
    }
}

#[test]
fn iid_model_is_trivial() {
    let m = MAModel::iid(InnovationLaw::exponential(2.0).unwrap()).unwrap();
    assert_eq!(m.sigma1_sq(), 0.25);
    assert_eq!(m.partial_sum_variance(1000), 250.0);
    assert_eq!(m.cox_grimmett(1), 0.0);
    let (lhs, rhs) = m.variance_gap_identity(17).unwrap();
    assert_eq!((lhs, rhs), (0.0, 0.0));
}
