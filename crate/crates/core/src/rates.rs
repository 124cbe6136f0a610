//! Exponent algebra of the Berry–Esséen bound for associated sequences.
//!
//! Every bound is of the form `n^{−e}` (times slowly varying factors), so
//! only exponents are tracked. For a blocking exponent α the bound is the sum
//! of five pieces; its decay exponent is the smallest piece. The rate of the
//! theorem is the best such exponent over α.

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// 2 < q ≤ 8/3
    LowQ,
    /// 8/3 < q < 3
    MidQ,
    /// q ≥ 3
    HighQ,
}

impl Regime {
    pub fn of(q: f64) -> Regime {
        if q <= 8.0 / 3.0 {
            Regime::LowQ
        } else if q < 3.0 {
            Regime::MidQ
        } else {
            Regime::HighQ
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::LowQ => "low-q",
            Regime::MidQ => "mid-q",
            Regime::HighQ => "high-q",
        }
    }
}

/// Slowly varying factor multiplying a power of n. `b_n = (log n)^b`, b < 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogFactor {
    /// `b_n²`
    BnSquared,
    /// `b_n⁻¹`
    BnInverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    /// The bound decays as `n^{−exponent}`.
    pub exponent: f64,
    pub regime: Regime,
    pub alpha_star: f64,
    pub log_factor: Option<LogFactor>,
}

fn check_q_theta(q: f64, theta: f64) -> Result<()> {
    if !(q > 2.0) || q.is_nan() {
        return Err(domain(format!("moment order q must exceed 2, got {q}")));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(domain(format!("theta must be positive and finite, got {theta}")));
    }
    Ok(())
}

/// Closed-form rate exponent with its optimal blocking exponent.
pub fn clt_rate_exponent(q: f64, theta: f64) -> Result<RateBound> {
    check_q_theta(q, theta)?;
    let regime = Regime::of(q);
    let (exponent, alpha_star) = match regime {
        Regime::LowQ => (
            theta * (q - 2.0) / (q + 2.0 * theta),
            2.0 * theta / (q + 2.0 * theta),
        ),
        Regime::MidQ => (
            q * theta / (q + 8.0 + 8.0 * theta),
            8.0 * theta / (q + 8.0 + 8.0 * theta),
        ),
        Regime::HighQ => (
            3.0 * theta / (11.0 + 8.0 * theta),
            8.0 * theta / (11.0 + 8.0 * theta),
        ),
    };
    Ok(RateBound {
        exponent,
        regime,
        alpha_star,
        log_factor: None,
    })
}

/// Limit of [`clt_rate_exponent`] as θ → ∞ (independent blocks).
pub fn clt_rate_exponent_limit(q: f64) -> Result<f64> {
    if !(q > 2.0) {
        return Err(domain(format!("moment order q must exceed 2, got {q}")));
    }
    Ok(match Regime::of(q) {
        Regime::LowQ => (q - 2.0) / 2.0,
        Regime::MidQ => q / 8.0,
        Regime::HighQ => 3.0 / 8.0,
    })
}

/// Interval of moment orders, intersected with q > 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
}

impl QInterval {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper || (self.lower == self.upper && !self.lower_closed)
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper && self.lower_closed
    }

    pub fn contains(&self, q: f64) -> bool {
        q <= self.upper && (q > self.lower || (self.lower_closed && q == self.lower))
    }
}

/// Rate for the remainder threshold `n^{−μα}`: exponent `μθ/(μ+1+θ)`,
/// attained for q in `[2μ/(1−2μ), 3] ∩ (2, 3]`.
pub fn mu_generalized_rate(mu: f64, theta: f64) -> Result<(f64, QInterval)> {
    if !(mu > 0.0 && mu < 0.5) {
        return Err(domain(format!("mu must lie in (0, 1/2), got {mu}")));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(domain(format!("theta must be positive and finite, got {theta}")));
    }
    let exponent = mu * theta / (mu + 1.0 + theta);
    let raw_lower = 2.0 * mu / (1.0 - 2.0 * mu);
    let interval = if raw_lower > 2.0 {
        QInterval {
            lower: raw_lower,
            upper: 3.0,
            lower_closed: true,
        }
    } else {
        QInterval {
            lower: 2.0,
            upper: 3.0,
            lower_closed: false,
        }
    };
    Ok((exponent, interval))
}

/// Exponent of one piece of the bound at a given α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PieceExponent {
    pub exponent: f64,
    pub log_factor: Option<LogFactor>,
}

/// The five pieces of the bound at blocking exponent α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComponentExponents {
    pub alpha: f64,
    /// Tail of the remainder block: `qα/8`.
    pub remainder_tail: PieceExponent,
    /// Distance between dependent and coupling blocks; `None` where it does
    /// not decay (α ≥ θ/(1+θ)).
    pub coupling: Option<PieceExponent>,
    /// Characteristic function of the coupling sum vs. its Gaussian
    /// counterpart: `α(q−2)/2`, capped at `α/2` for q ≥ 3.
    pub charfn: PieceExponent,
    /// Gaussian with block variance vs. standard normal.
    pub gaussian: PieceExponent,
    /// Shift by the remainder threshold: `3α/8`.
    pub smoothing: PieceExponent,
}

impl ComponentExponents {
    /// Exponent of the whole bound, `None` when some piece does not decay.
    pub fn min_exponent(&self) -> Option<f64> {
        let c = self.coupling?;
        Some(
            [
                self.remainder_tail.exponent,
                c.exponent,
                self.charfn.exponent,
                self.gaussian.exponent,
                self.smoothing.exponent,
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min),
        )
    }

    pub fn labeled(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("remainder_tail", Some(self.remainder_tail.exponent)),
            ("coupling", self.coupling.map(|c| c.exponent)),
            ("charfn", Some(self.charfn.exponent)),
            ("gaussian", Some(self.gaussian.exponent)),
            ("smoothing", Some(self.smoothing.exponent)),
        ]
    }
}

pub fn component_exponents(alpha: f64, q: f64, theta: f64) -> Result<ComponentExponents> {
    check_q_theta(q, theta)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let plain = |exponent| PieceExponent {
        exponent,
        log_factor: None,
    };
    let coupling = if alpha < 2.0 * theta / (3.0 + 2.0 * theta) {
        Some(PieceExponent {
            exponent: alpha / 2.0,
            log_factor: Some(LogFactor::BnInverse),
        })
    } else if alpha < theta / (1.0 + theta) {
        Some(PieceExponent {
            exponent: theta - alpha * (1.0 + theta),
            log_factor: Some(LogFactor::BnSquared),
        })
    } else {
        None
    };
    let charfn = if q >= 3.0 {
        plain(alpha / 2.0)
    } else {
        plain(alpha * (q - 2.0) / 2.0)
    };
    let gaussian = if alpha <= 2.0 * theta / (1.0 + 2.0 * theta) {
        PieceExponent {
            exponent: alpha / 2.0,
            log_factor: Some(LogFactor::BnInverse),
        }
    } else {
        plain((1.0 - alpha) * theta)
    };
    Ok(ComponentExponents {
        alpha,
        remainder_tail: plain(q * alpha / 8.0),
        coupling,
        charfn,
        gaussian,
        smoothing: plain(3.0 * alpha / 8.0),
    })
}

/// A linear piece `intercept + slope·α` valid on `[from, to)`.
#[derive(Clone, Copy, Debug)]
struct Segment {
    slope: f64,
    intercept: f64,
    from: f64,
    to: f64,
}

fn piece_segments(q: f64, theta: f64) -> Vec<Vec<Segment>> {
    let a_coupling = 2.0 * theta / (3.0 + 2.0 * theta);
    let a_valid = theta / (1.0 + theta);
    let a_gauss = 2.0 * theta / (1.0 + 2.0 * theta);
    let seg = |slope, intercept, from, to| Segment {
        slope,
        intercept,
        from,
        to,
    };
    let cf_slope = if q >= 3.0 { 0.5 } else { (q - 2.0) / 2.0 };
    vec![
        vec![seg(q / 8.0, 0.0, 0.0, 1.0)],
        vec![
            seg(0.5, 0.0, 0.0, a_coupling),
            seg(-(1.0 + theta), theta, a_coupling, a_valid),
        ],
        vec![seg(cf_slope, 0.0, 0.0, 1.0)],
        vec![seg(0.5, 0.0, 0.0, a_gauss), seg(-theta, theta, a_gauss, 1.0)],
        vec![seg(3.0 / 8.0, 0.0, 0.0, 1.0)],
    ]
}

/// Maximizes the bound exponent over α by enumerating every breakpoint of the
/// piecewise-linear pieces and every pairwise crossing of their segments.
/// Ties resolve to the smallest α.
pub fn optimal_alpha(q: f64, theta: f64) -> Result<(f64, f64)> {
    check_q_theta(q, theta)?;
    let pieces = piece_segments(q, theta);
    let segments: Vec<Segment> = pieces.iter().flatten().copied().collect();
    let mut candidates: Vec<f64> = Vec::new();
    for s in &segments {
        candidates.push(s.from);
        candidates.push(s.to);
    }
    for (i, s) in segments.iter().enumerate() {
        for t in &segments[i + 1..] {
            if s.slope != t.slope {
                candidates.push((t.intercept - s.intercept) / (s.slope - t.slope));
            }
        }
    }
    candidates.retain(|a| *a > 0.0 && *a < 1.0 && a.is_finite());
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut best: Option<(f64, f64)> = None;
    for alpha in candidates {
        let Ok(c) = component_exponents(alpha, q, theta) else {
            continue;
        };
        let Some(e) = c.min_exponent() else { continue };
        let better = match best {
            None => true,
            Some((_, b)) => e > b * (1.0 + 1e-14),
        };
        if better {
            best = Some((alpha, e));
        }
    }
    best.ok_or_else(|| domain("no blocking exponent gives a decaying bound"))
}

/// Admissible parameter windows of the moderate deviation theorem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModDevWindows {
    pub q: f64,
    pub theta: f64,
    pub lambda: f64,
    /// Open interval `(1/2, (2θ−λ)/(2θ+2))` for the blocking exponent.
    pub alpha_window: (f64, f64),
    /// Open interval `(0, (qα−λ)/(2q))` at the midpoint α of `alpha_window`;
    /// `(0, 0)` when infeasible.
    pub epsilon_window: (f64, f64),
    /// θ > 1 + λ, equivalently `alpha_window` is nonempty.
    pub feasible: bool,
    /// λ < (q−2)/2.
    pub lambda_admissible: bool,
}

impl ModDevWindows {
    pub fn epsilon_window_at(&self, alpha: f64) -> (f64, f64) {
        (0.0, ((self.q * alpha - self.lambda) / (2.0 * self.q)).max(0.0))
    }

    pub fn alpha_midpoint(&self) -> Option<f64> {
        self.feasible
            .then_some(0.5 * (self.alpha_window.0 + self.alpha_window.1))
    }
}

pub fn moddev_windows(q: f64, theta: f64, lambda: f64) -> Result<ModDevWindows> {
    check_q_theta(q, theta)?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    let upper = (2.0 * theta - lambda) / (2.0 * theta + 2.0);
    let feasible = theta > 1.0 + lambda;
    let mut w = ModDevWindows {
        q,
        theta,
        lambda,
        alpha_window: if feasible { (0.5, upper) } else { (0.5, 0.5) },
        epsilon_window: (0.0, 0.0),
        feasible,
        lambda_admissible: lambda < (q - 2.0) / 2.0,
    };
    if let Some(mid) = w.alpha_midpoint() {
        w.epsilon_window = w.epsilon_window_at(mid);
    }
    Ok(w)
}

/// `α(q−2)`: λ must stay below this for the coupling-block moderate deviation.
pub fn frolov_block_threshold(alpha: f64, q: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(q > 2.0) {
        return Err(domain(format!("moment order q must exceed 2, got {q}")));
    }
    Ok(alpha * (q - 2.0))
}

/// One row of the exponent table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateTableRow {
    pub q: f64,
    pub theta: f64,
    pub exponent: f64,
    pub regime: &'static str,
    pub alpha_star: f64,
    pub optimizer_exponent: f64,
}

pub fn rate_table(qs: &[f64], thetas: &[f64]) -> Result<Vec<RateTableRow>> {
    let mut rows = Vec::with_capacity(qs.len() * thetas.len());
    for &theta in thetas {
        for &q in qs {
            let b = clt_rate_exponent(q, theta)?;
            let (_, opt) = optimal_alpha(q, theta)?;
            rows.push(RateTableRow {
                q,
                theta,
                exponent: b.exponent,
                regime: b.regime.label(),
                alpha_star: b.alpha_star,
                optimizer_exponent: opt,
            });
        }
    }
    Ok(rows)
}
