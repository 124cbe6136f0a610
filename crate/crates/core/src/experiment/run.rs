use super::config::{ExperimentConfig, ExperimentKind};
use crate::charfn::newman_check;
use crate::empirics::{
    clt_rate_experiment_with, coupling_samples, frolov_sweep, ks_two_sample, ks_two_sample_noise_floor,
    l_n_slope, moddev_ratio, remainder_tail, remainder_threshold, RateOptions,
};
use crate::error::{Error, Result};
use crate::model::MAModel;
use crate::rates;
use crate::simulate::{BlockScheme, MCConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const SUMMARY_SCHEMA: u32 = 1;

/// Plot-ready rows. Every experiment table starts with `n, statistic,
/// stderr, theory`; the rates table has its own columns.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Column by header name, parsed as floats (empty cells become NaN).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[i].parse().unwrap_or(f64::NAN))
                .collect(),
        )
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema: u32,
    pub kind: ExperimentKind,
    pub master_seed: u64,
    pub resolved_config: ExperimentConfig,
    /// CSV file name, relative to the output directory.
    pub csv: String,
    pub slopes: BTreeMap<String, f64>,
    pub flags: Vec<String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Outcome of [`execute`]: the data table and its summary.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub summary: RunSummary,
}

struct Findings {
    slopes: BTreeMap<String, f64>,
    flags: Vec<String>,
    checks: Vec<Check>,
}

impl Findings {
    fn new() -> Self {
        Findings {
            slopes: BTreeMap::new(),
            flags: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail,
        });
    }
}

/// Resolves, validates and runs `config` without touching the file system.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutput> {
    let cfg = config.resolve()?;
    let mc = MCConfig::new(
        cfg.replicates.expect("resolved"),
        cfg.master_seed.expect("resolved"),
    );
    let mut f = Findings::new();
    let table = match cfg.kind {
        ExperimentKind::RatesTable => rates_table(&cfg, &mut f)?,
        kind => {
            let model = cfg.model.as_ref().expect("resolved").build()?;
            match kind {
                ExperimentKind::CltRate => clt_rate(&cfg, &model, &mc, &mut f)?,
                ExperimentKind::Coupling => coupling(&cfg, &model, &mc, &mut f)?,
                ExperimentKind::Newman => newman(&cfg, &model, &mc, &mut f)?,
                ExperimentKind::Remainder => remainder(&cfg, &model, &mc, &mut f)?,
                ExperimentKind::Moddev => moddev(&cfg, &model, &mc, &mut f)?,
                ExperimentKind::Frolov => frolov(&cfg, &model, &mc, &mut f)?,
                ExperimentKind::RatesTable => unreachable!(),
            }
        }
    };
    let pass = f.checks.iter().all(|c| c.pass);
    Ok(RunOutput {
        table,
        summary: RunSummary {
            schema: SUMMARY_SCHEMA,
            kind: cfg.kind,
            master_seed: mc.master_seed,
            csv: cfg.output.csv.clone().expect("resolved"),
            resolved_config: cfg,
            slopes: f.slopes,
            flags: f.flags,
            checks: f.checks,
            pass,
        },
    })
}

/// Paths written by [`run`].
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub summary: PathBuf,
}

/// [`execute`] and write the CSV and the JSON summary into the configured
/// output directory.
pub fn run(config: &ExperimentConfig) -> Result<(RunSummary, Artifacts)> {
    let out = execute(config)?;
    let cfg = &out.summary.resolved_config;
    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir)?;
    let artifacts = Artifacts {
        csv: dir.join(cfg.output.csv.as_deref().expect("resolved")),
        summary: dir.join(cfg.output.summary.as_deref().expect("resolved")),
    };
    std::fs::write(&artifacts.csv, out.table.to_csv()?)?;
    let mut json = serde_json::to_string_pretty(&out.summary)?;
    json.push('\n');
    std::fs::write(&artifacts.summary, json)?;
    Ok((out.summary, artifacts))
}

fn rates_table(cfg: &ExperimentConfig, f: &mut Findings) -> Result<Table> {
    let rows = rates::rate_table(
        cfg.q_grid.as_deref().expect("resolved"),
        cfg.theta_grid.as_deref().expect("resolved"),
    )?;
    let mut t = Table::new(&["q", "theta", "exponent", "regime", "alpha_star", "optimizer_exponent"]);
    let mut worst = 0.0f64;
    for r in &rows {
        worst = worst.max((r.exponent - r.optimizer_exponent).abs());
        t.push(vec![
            num(r.q),
            num(r.theta),
            num(r.exponent),
            r.regime.to_string(),
            num(r.alpha_star),
            num(r.optimizer_exponent),
        ]);
    }
    f.check(
        "optimizer-matches-closed-form",
        worst <= 1e-12,
        format!("largest difference {worst:e}"),
    );
    Ok(t)
}

fn clt_rate(cfg: &ExperimentConfig, model: &MAModel, mc: &MCConfig, f: &mut Findings) -> Result<Table> {
    let n_grid = cfg.n_grid.as_deref().expect("resolved");
    let opts = RateOptions {
        batches: cfg.batches.expect("resolved"),
        q: cfg.q,
        theta: cfg.theta,
    };
    let res = clt_rate_experiment_with(model, n_grid, mc, &opts)?;
    let mut t = Table::new(&["n", "statistic", "stderr", "theory"]);
    for (i, &n) in n_grid.iter().enumerate() {
        t.push(vec![
            n.to_string(),
            num(res.distances[i]),
            num(res.distance_stderr[i]),
            num((n as f64).powf(-res.theoretical_exponent)),
        ]);
    }
    f.slopes.insert("fitted".into(), res.fitted_slope);
    f.slopes.insert("theory".into(), -res.theoretical_exponent);
    if res.exact_normal {
        f.flags.push("exact-normal".into());
        let worst = res.distances.iter().fold(0.0f64, |m, d| m.max(*d));
        f.check(
            "at-noise-floor",
            worst <= res.noise_floor,
            format!("largest distance {worst} against floor {}", res.noise_floor),
        );
    } else {
        f.check(
            "rate-non-violation",
            res.fitted_slope <= -res.theoretical_exponent + 0.1,
            format!(
                "slope {} against bound -{} + 0.1",
                res.fitted_slope, res.theoretical_exponent
            ),
        );
    }
    Ok(t)
}

fn coupling(cfg: &ExperimentConfig, model: &MAModel, mc: &MCConfig, f: &mut Findings) -> Result<Table> {
    let alpha = cfg.alpha.expect("resolved");
    let mut t = Table::new(&["n", "statistic", "stderr", "theory"]);
    let floor = ks_two_sample_noise_floor(mc.replicates, mc.replicates);
    let mut distances = Vec::new();
    for &n in cfg.n_grid.as_deref().expect("resolved") {
        let scheme = BlockScheme::new(n, alpha)?;
        let (a, b) = coupling_samples(model, &scheme, &mc.derived(n))?;
        let d = ks_two_sample(&a, &b)?;
        distances.push(d);
        t.push(vec![n.to_string(), num(d), String::new(), num(floor)]);
    }
    let monotone = distances.windows(2).all(|w| w[1] <= w[0] + floor);
    f.check(
        "nonincreasing-within-floor",
        monotone,
        format!("distances {distances:?}, floor {floor}"),
    );
    if model.order() == 0 {
        f.flags.push("independent".into());
        f.check(
            "independent-at-floor",
            distances.iter().all(|d| *d <= floor),
            format!("floor {floor}"),
        );
    }
    Ok(t)
}

fn newman(cfg: &ExperimentConfig, model: &MAModel, mc: &MCConfig, f: &mut Findings) -> Result<Table> {
    let alpha = cfg.alpha.expect("resolved");
    let scale = cfg.t_scale.expect("resolved");
    let mut t = Table::new(&["n", "statistic", "stderr", "theory"]);
    let mut ok = true;
    for &n in cfg.n_grid.as_deref().expect("resolved") {
        let scheme = BlockScheme::new(n, alpha)?;
        let s_p = model.partial_sum_variance(scheme.block_len).sqrt();
        let t_vec = vec![scale / s_p; scheme.block_count as usize];
        let c = newman_check(model, &scheme, &t_vec, &mc.derived(n))?;
        ok &= c.holds(4.0);
        t.push(vec![n.to_string(), num(c.lhs.value), num(c.lhs.stderr), num(c.rhs)]);
    }
    f.check("lhs-below-rhs", ok, "lhs <= rhs + 4 stderr at every n".into());
    Ok(t)
}

fn remainder(cfg: &ExperimentConfig, model: &MAModel, mc: &MCConfig, f: &mut Findings) -> Result<Table> {
    let alpha = cfg.alpha.expect("resolved");
    let mut t = Table::new(&["n", "statistic", "stderr", "theory"]);
    let mut ok = true;
    for &n in cfg.n_grid.as_deref().expect("resolved") {
        let scheme = BlockScheme::new(n, alpha)?;
        let p = remainder_tail(model, &scheme, &mc.derived(n))?;
        // Chebyshev: P(|Y| > c) ≤ Var(Y)/c²
        let bound = if scheme.remainder_len == 0 {
            0.0
        } else {
            let c = remainder_threshold(model, &scheme);
            (model.partial_sum_variance(scheme.remainder_len) / (c * c)).min(1.0)
        };
        ok &= p.value <= bound + 4.0 * p.stderr;
        t.push(vec![n.to_string(), num(p.value), num(p.stderr), num(bound)]);
    }
    f.check("below-chebyshev", ok, "tail <= Var/threshold^2 + 4 stderr".into());
    Ok(t)
}

fn moddev(cfg: &ExperimentConfig, model: &MAModel, mc: &MCConfig, f: &mut Findings) -> Result<Table> {
    let lambda = cfg.lambda.expect("resolved");
    let mut t = Table::new(&["n", "statistic", "stderr", "theory", "x_n", "exceedances"]);
    let mut ok = true;
    for &n in cfg.n_grid.as_deref().expect("resolved") {
        let e = moddev_ratio(model, n, lambda, &mc.derived(n))?;
        ok &= e.ratio.agrees_with(1.0, 4.0);
        t.push(vec![
            n.to_string(),
            num(e.ratio.value),
            num(e.ratio.stderr),
            num(1.0),
            num(e.x_n),
            e.exceedances.to_string(),
        ]);
    }
    f.check("ratio-near-one", ok, "ratio within 4 stderr of 1".into());
    Ok(t)
}

fn frolov(cfg: &ExperimentConfig, model: &MAModel, mc: &MCConfig, f: &mut Findings) -> Result<Table> {
    let alpha = cfg.alpha.expect("resolved");
    let q = cfg.q.expect("resolved");
    let lambda = cfg.lambda.expect("resolved");
    let n_grid = cfg.n_grid.as_deref().expect("resolved");
    let diags = frolov_sweep(model, alpha, n_grid, q, lambda, mc)?;
    let theory = alpha * (2.0 - q) / 2.0;
    let mut t = Table::new(&[
        "n",
        "statistic",
        "stderr",
        "theory",
        "lambda_delta_0.5",
        "lambda_delta_1",
        "e6",
    ]);
    for d in &diags {
        let n = d.scheme.n;
        t.push(vec![
            n.to_string(),
            num(d.l_n),
            num(d.m_n.stderr / d.b_n.powf(q / 2.0)),
            num((n as f64).powf(theory)),
            num(d.lambda_fn[0].value.value),
            num(d.lambda_fn[1].value.value),
            opt(d.e6),
        ]);
    }
    let slope = l_n_slope(&diags).unwrap_or(f64::NAN);
    f.slopes.insert("l_n".into(), slope);
    f.slopes.insert("theory".into(), theory);
    f.check(
        "l-n-slope",
        (slope - theory).abs() <= 0.1,
        format!("slope {slope} against {theory} +- 0.1"),
    );
    let threshold = rates::frolov_block_threshold(alpha, q)?;
    let e6: Vec<Option<f64>> = diags.iter().map(|d| d.e6).collect();
    if lambda < threshold {
        f.flags.push("lambda-below-threshold".into());
        let decreasing = e6.windows(2).all(|w| matches!(w, [Some(a), Some(b)] if b < a));
        let negative = matches!(e6.last(), Some(Some(v)) if *v < 0.0);
        f.check(
            "e6-decreasing-negative",
            decreasing && negative,
            format!("e6 {e6:?}"),
        );
    } else if lambda > 1.5 * threshold {
        f.flags.push("lambda-above-threshold".into());
        f.check(
            "e6-eventually-positive",
            matches!(e6.last(), Some(Some(v)) if *v > 0.0),
            format!("e6 {e6:?}"),
        );
    }
    Ok(t)
}
