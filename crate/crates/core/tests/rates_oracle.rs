//! Rate exponents against a direct maximization of the piecewise bound.

use associated_clt::rates::{
    clt_rate_exponent, clt_rate_exponent_limit, component_exponents, moddev_windows,
    mu_generalized_rate, optimal_alpha, Regime,
};

/// Smallest of the five piece exponents at α, written out independently.
fn bound_exponent(alpha: f64, q: f64, theta: f64) -> f64 {
    let coupling = if alpha < 2.0 * theta / (3.0 + 2.0 * theta) {
        alpha / 2.0
    } else if alpha < theta / (1.0 + theta) {
        theta - alpha * (1.0 + theta)
    } else {
        f64::NEG_INFINITY
    };
    let cf = if q >= 3.0 { alpha / 2.0 } else { alpha * (q - 2.0) / 2.0 };
    let gauss = (alpha / 2.0).min((1.0 - alpha) * theta);
    [q * alpha / 8.0, coupling, cf, gauss, 3.0 * alpha / 8.0]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// The bound exponent is concave in α, so ternary search finds its maximum.
fn ternary_max(q: f64, theta: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0, theta / (1.0 + theta));
    for _ in 0..300 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if bound_exponent(a, q, theta) < bound_exponent(b, q, theta) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let alpha = 0.5 * (lo + hi);
    (alpha, bound_exponent(alpha, q, theta))
}

#[test]
fn closed_forms_match_direct_maximization() {
    for i in 0..40 {
        for j in 0..40 {
            let q = 2.05 + 3.0 * i as f64 / 39.0;
            let theta = 0.1 + 6.0 * j as f64 / 39.0;
            let (alpha, e) = ternary_max(q, theta);
            let b = clt_rate_exponent(q, theta).unwrap();
            assert!((b.exponent - e).abs() < 1e-12, "q {q} theta {theta}: {} vs {e}", b.exponent);
            assert!((b.alpha_star - alpha).abs() < 1e-8, "q {q} theta {theta}");
            let (oa, oe) = optimal_alpha(q, theta).unwrap();
            assert!((oe - e).abs() < 1e-12);
            assert!((oa - alpha).abs() < 1e-8);
        }
    }
}

#[test]
fn component_pieces_agree_with_oracle() {
    for &(alpha, q, theta) in &[(0.3, 2.5, 1.0), (0.42, 3.0, 1.0), (0.7, 4.0, 3.0), (0.1, 2.2, 0.5)] {
        let c = component_exponents(alpha, q, theta).unwrap();
        let got = c.min_exponent().unwrap_or(f64::NEG_INFINITY);
        assert!((got - bound_exponent(alpha, q, theta)).abs() < 1e-15);
    }
    assert!(component_exponents(0.9, 3.0, 1.0).unwrap().min_exponent().is_none());
}

#[test]
fn printed_spot_values() {
    let b = clt_rate_exponent(3.0, 1.0).unwrap();
    assert!((b.exponent - 3.0 / 19.0).abs() < 1e-15);
    assert!((b.alpha_star - 8.0 / 19.0).abs() < 1e-15);
    assert_eq!(b.regime, Regime::HighQ);
    let at_boundary = clt_rate_exponent(8.0 / 3.0, 2.0).unwrap();
    assert!((at_boundary.exponent - 0.2).abs() < 1e-15);
    let far = clt_rate_exponent(3.0, 1e6).unwrap();
    assert!((far.exponent - clt_rate_exponent_limit(3.0).unwrap()).abs() < 1e-5);
    assert_eq!(clt_rate_exponent_limit(3.0).unwrap(), 0.375);
}

#[test]
fn mu_rate_and_windows() {
    let (e, iv) = mu_generalized_rate(0.25, 1.0).unwrap();
    assert!((e - 1.0 / 9.0).abs() < 1e-15);
    assert!(iv.contains(3.0) && iv.contains(2.5) && !iv.contains(2.0));
    let (e, iv) = mu_generalized_rate(0.375, 1.0).unwrap();
    assert!((e - 0.375 / 2.375).abs() < 1e-15);
    assert!(iv.is_point() && iv.contains(3.0));
    let w = moddev_windows(3.0, 4.0, 0.5).unwrap();
    assert!(w.feasible);
    assert_eq!(w.alpha_window, (0.5, 0.75));
    let w = moddev_windows(3.0, 1.0, 0.5).unwrap();
    assert!(!w.feasible);
}
