use crate::error::{Error, Result};
use crate::model::{DecayFit, InnovationLaw, MAModel};
use crate::rates;
use crate::simulate::BlockScheme;
use crate::special::normal_sf;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

pub const DEFAULT_REPLICATES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

/// Weight family of the moving-average model.
///
/// ```toml
/// [model]
/// family = "geometric"
/// rho = 0.5
/// k = 48
/// innovation = { kind = "centered-exponential", rate = 1.0 }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Iid { innovation: InnovationLaw },
    Geometric { rho: f64, k: usize, innovation: InnovationLaw },
    Power { beta: f64, k: usize, innovation: InnovationLaw },
    Custom { weights: Vec<f64>, innovation: InnovationLaw },
}

impl ModelSpec {
    pub fn build(&self) -> Result<MAModel> {
        match self {
            ModelSpec::Iid { innovation } => MAModel::iid(innovation.clone()),
            ModelSpec::Geometric { rho, k, innovation } => MAModel::geometric(*rho, *k, innovation.clone()),
            ModelSpec::Power { beta, k, innovation } => MAModel::power(*beta, *k, innovation.clone()),
            ModelSpec::Custom { weights, innovation } => MAModel::new(weights.clone(), innovation.clone()),
        }
    }

    pub fn innovation(&self) -> &InnovationLaw {
        match self {
            ModelSpec::Iid { innovation }
            | ModelSpec::Geometric { innovation, .. }
            | ModelSpec::Power { innovation, .. }
            | ModelSpec::Custom { innovation, .. } => innovation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    RatesTable,
    CltRate,
    Coupling,
    Newman,
    Remainder,
    Moddev,
    Frolov,
}

impl ExperimentKind {
    pub fn label(&self) -> &'static str {
        match self {
            ExperimentKind::RatesTable => "rates-table",
            ExperimentKind::CltRate => "clt-rate",
            ExperimentKind::Coupling => "coupling",
            ExperimentKind::Newman => "newman",
            ExperimentKind::Remainder => "remainder",
            ExperimentKind::Moddev => "moddev",
            ExperimentKind::Frolov => "frolov",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Constraint family a [`Violation`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// Moment assumption `E|X|^q < ∞`, q > 2.
    A1,
    /// Decay of the variance gap, θ > 0.
    A2,
    /// Decay of the Cox–Grimmett coefficient, δ > 0.
    A3,
    /// θ > 1 + λ.
    E8,
    /// 1/2 < α < (2θ−λ)/(2θ+2).
    E10,
    /// 0 < ε < (qα−λ)/(2q) nonempty.
    E11,
    /// Plumbing: grids, replicate counts, block geometry, precision.
    Config,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] {}: {}", self.constraint, self.field, self.message)
    }
}

/// One experiment. Every optional field is filled in by
/// [`resolve`](ExperimentConfig::resolve), and the resolved config is what the
/// JSON summary records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Overrides the decay exponent fitted from the model. An independent
    /// model resolves to no θ at all (θ = ∞).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    /// Batches for the KS distance of `clt-rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batches: Option<u64>,
    /// Frequency scale of `newman`: `t_j = t_scale / s_p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

fn pow2_grid(lo: u32, hi: u32, step: usize) -> Vec<u64> {
    (lo..=hi).step_by(step).map(|e| 1u64 << e).collect()
}

fn default_q_grid() -> Vec<f64> {
    (21..=50).map(|i| i as f64 / 10.0).collect()
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            model: None,
            n_grid: None,
            alpha: None,
            q: None,
            theta: None,
            lambda: None,
            replicates: None,
            master_seed: None,
            batches: None,
            t_scale: None,
            q_grid: None,
            theta_grid: None,
            output: OutputSpec::default(),
        }
    }

    pub fn with_model(mut self, model: ModelSpec) -> Self {
        self.model = Some(model);
        self
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Accepts a bare config or an emitted summary, whose `resolved_config`
    /// is taken.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        let inner = match value.get("resolved_config") {
            Some(v) => v.clone(),
            None => value,
        };
        Ok(serde_json::from_value(inner)?)
    }

    /// Reads `.json` files as JSON and everything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn replicates_or_default(&self) -> u64 {
        self.replicates.unwrap_or(DEFAULT_REPLICATES)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Fills in every default and checks every constraint. All violations
    /// are reported together.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let (resolved, violations) = self.resolve_collect();
        if violations.is_empty() {
            Ok(resolved)
        } else {
            Err(Error::Validation(violations))
        }
    }

    /// Violations of the config; empty when it would run.
    pub fn validate(&self) -> Vec<Violation> {
        self.resolve_collect().1
    }

    fn resolve_collect(&self) -> (ExperimentConfig, Vec<Violation>) {
        let mut v = Vec::new();
        let mut push = |constraint, field: &str, message: String| {
            v.push(Violation {
                constraint,
                field: field.to_string(),
                message,
            })
        };
        let mut r = self.clone();
        let kind = self.kind;
        r.replicates = Some(self.replicates_or_default());
        r.master_seed = Some(self.master_seed.unwrap_or(DEFAULT_SEED));
        r.output.dir = Some(self.out_dir());
        r.output.csv.get_or_insert_with(|| format!("{kind}.csv"));
        r.output.summary.get_or_insert_with(|| format!("{kind}.summary.json"));
        if r.replicates == Some(0) {
            push(Constraint::Config, "replicates", "must be at least 1".into());
        }

        if kind == ExperimentKind::RatesTable {
            let qs = r.q_grid.get_or_insert_with(default_q_grid).clone();
            let thetas = r.theta_grid.get_or_insert_with(|| vec![0.5, 1.0, 2.0, 4.0]).clone();
            if qs.is_empty() || thetas.is_empty() {
                push(Constraint::Config, "q_grid/theta_grid", "grids must be nonempty".into());
            }
            for q in qs.iter().filter(|q| !(**q > 2.0) || !q.is_finite()) {
                push(Constraint::A1, "q_grid", format!("q = {q} must be finite and exceed 2"));
            }
            for t in thetas.iter().filter(|t| !(**t > 0.0) || !t.is_finite()) {
                push(Constraint::A2, "theta_grid", format!("theta = {t} must be positive and finite"));
            }
            return (r, v);
        }

        let model = match self.model.as_ref().map(|m| (m, m.build())) {
            None => {
                push(Constraint::Config, "model", format!("kind {kind} needs a model"));
                return (r, v);
            }
            Some((spec, Err(e))) => {
                let constraint = match e {
                    Error::Moment { .. } => Constraint::A1,
                    _ if spec.innovation().validate().is_err() => Constraint::A1,
                    _ => Constraint::Config,
                };
                push(constraint, "model", e.to_string());
                return (r, v);
            }
            Some((_, Ok(m))) => m,
        };
        let law = model.innovation();

        let default_grid = match kind {
            ExperimentKind::CltRate | ExperimentKind::Frolov => pow2_grid(8, 14, 1),
            ExperimentKind::Coupling => pow2_grid(8, 12, 2),
            ExperimentKind::Newman => vec![64],
            ExperimentKind::Remainder => vec![1000, 10_000, 100_000],
            ExperimentKind::Moddev => vec![100_000],
            ExperimentKind::RatesTable => unreachable!(),
        };
        let n_grid = r.n_grid.get_or_insert(default_grid).clone();
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            push(Constraint::Config, "n_grid", "must be nonempty and strictly increasing".into());
        }

        let uses_q = matches!(
            kind,
            ExperimentKind::CltRate | ExperimentKind::Moddev | ExperimentKind::Frolov
        );
        if uses_q {
            let q = *r.q.get_or_insert(law.default_moment_order());
            if !(q > 2.0) {
                push(Constraint::A1, "q", format!("moment order {q} must exceed 2"));
            } else if let Err(e) = law.check_moment(q) {
                push(Constraint::A1, "q", e.to_string());
            }
        }

        let fitted = match model.profile() {
            Ok(p) => match p.theta {
                DecayFit::Exponent(t) => Some(t),
                DecayFit::Exact | DecayFit::Vanishing => None,
            },
            Err(e) => {
                push(Constraint::Config, "model", e.to_string());
                None
            }
        };
        if let Some(t) = self.theta {
            if !(t > 0.0) || !t.is_finite() {
                push(Constraint::A2, "theta", format!("theta = {t} must be positive and finite"));
            }
        } else {
            r.theta = fitted;
        }
        if let Ok(p) = model.profile() {
            if let DecayFit::Exponent(d) = p.delta {
                if !(d > 0.0) {
                    push(Constraint::A3, "model", format!("Cox-Grimmett coefficient does not decay (delta = {d})"));
                }
            }
        }

        let uses_alpha = matches!(
            kind,
            ExperimentKind::Coupling
                | ExperimentKind::Newman
                | ExperimentKind::Remainder
                | ExperimentKind::Frolov
        );
        if uses_alpha {
            let alpha = *r.alpha.get_or_insert(0.5);
            if !(alpha > 0.0 && alpha < 1.0) {
                push(Constraint::Config, "alpha", format!("alpha = {alpha} must lie in (0, 1)"));
            } else {
                for &n in &n_grid {
                    if let Err(e) = BlockScheme::new(n, alpha) {
                        push(Constraint::Config, "n_grid", e.to_string());
                    }
                }
            }
        }

        let uses_lambda = matches!(kind, ExperimentKind::Moddev | ExperimentKind::Frolov);
        if uses_lambda {
            let default_lambda = if kind == ExperimentKind::Moddev { 0.5 } else { 0.25 };
            let lambda = *r.lambda.get_or_insert(default_lambda);
            if !(lambda >= 0.0) || !lambda.is_finite() {
                push(Constraint::Config, "lambda", format!("lambda = {lambda} must be finite and nonnegative"));
            }
        }

        match kind {
            ExperimentKind::CltRate => {
                let batches = *r.batches.get_or_insert(1);
                if batches == 0 || batches > r.replicates.unwrap_or(0) {
                    push(Constraint::Config, "batches", format!("{batches} batches do not fit the replicate count"));
                }
                if n_grid.first().is_some_and(|n| *n < 16) {
                    push(Constraint::Config, "n_grid", "rate experiments need n >= 16".into());
                }
            }
            ExperimentKind::Newman => {
                let t = *r.t_scale.get_or_insert(1.0);
                if !t.is_finite() {
                    push(Constraint::Config, "t_scale", "must be finite".into());
                }
            }
            ExperimentKind::Moddev => {
                let (q, lambda) = (r.q.unwrap_or(3.0), r.lambda.unwrap_or(0.0));
                moddev_constraints(&mut push, q, r.theta, lambda, self.alpha, &mut r.alpha);
                let reps = r.replicates.unwrap_or(0) as f64;
                for &n in n_grid.iter().filter(|n| **n >= 2) {
                    let tail = normal_sf((lambda * (n as f64).ln()).sqrt());
                    if reps * tail < crate::empirics::MIN_EXPECTED_EXCEEDANCES {
                        push(
                            Constraint::Config,
                            "replicates",
                            format!(
                                "only {:.1} exceedances expected at n = {n}; use at least {:.0} replicates",
                                reps * tail,
                                (crate::empirics::MIN_EXPECTED_EXCEEDANCES / tail).ceil()
                            ),
                        );
                    }
                }
            }
            _ => {}
        }
        (r, v)
    }
}

fn moddev_constraints(
    push: &mut impl FnMut(Constraint, &str, String),
    q: f64,
    theta: Option<f64>,
    lambda: f64,
    alpha_given: Option<f64>,
    alpha_out: &mut Option<f64>,
) {
    if !(q > 2.0) || !(lambda >= 0.0) {
        return;
    }
    let Some(theta) = theta else {
        // independent model: no dependence restriction on the block exponent
        alpha_out.get_or_insert(0.75);
        return;
    };
    let Ok(w) = rates::moddev_windows(q, theta, lambda) else {
        return;
    };
    if !w.feasible {
        push(
            Constraint::E8,
            "theta",
            format!("theta > 1 + lambda fails: theta = {theta}, lambda = {lambda}"),
        );
    }
    let alpha = alpha_given.or(w.alpha_midpoint());
    match alpha {
        Some(a) if a > w.alpha_window.0 && a < w.alpha_window.1 => {
            *alpha_out = Some(a);
            if !(q * a > lambda) {
                push(
                    Constraint::E11,
                    "alpha",
                    format!("no epsilon in (0, (q alpha - lambda)/(2q)) at alpha = {a}"),
                );
            }
        }
        _ => push(
            Constraint::E10,
            "alpha",
            format!(
                "alpha must lie in (1/2, (2 theta - lambda)/(2 theta + 2)) = (0.5, {}), got {}",
                (2.0 * theta - lambda) / (2.0 * theta + 2.0),
                alpha.map_or("none".to_string(), |a| a.to_string())
            ),
        ),
    }
}
