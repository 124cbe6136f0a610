use associated_clt::experiment::{self, ExperimentConfig, ExperimentKind};
use associated_clt::Error;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(version, about = "Rate and moderate-deviation experiments for associated sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML), or a JSON summary from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicates: Option<u64>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Rate exponent table over a (q, theta) grid.
    Rates,
    /// Kolmogorov distance of S_n/s_n to the normal law along n.
    CltRate,
    /// Distance between dependent and coupling block sums.
    Coupling,
    /// Newman's inequality on the block sums.
    Newman,
    /// Tail of the remainder block.
    Remainder,
    /// Moderate deviation ratio.
    Moddev,
    /// Moment and truncation conditions of the coupling blocks.
    Frolov,
    /// Check a config and list every violated constraint.
    Validate,
}

impl Command {
    fn kind(self) -> Option<ExperimentKind> {
        Some(match self {
            Command::Rates => ExperimentKind::RatesTable,
            Command::CltRate => ExperimentKind::CltRate,
            Command::Coupling => ExperimentKind::Coupling,
            Command::Newman => ExperimentKind::Newman,
            Command::Remainder => ExperimentKind::Remainder,
            Command::Moddev => ExperimentKind::Moddev,
            Command::Frolov => ExperimentKind::Frolov,
            Command::Validate => return None,
        })
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&cli.config, cli.command.kind()) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(kind)) => ExperimentConfig::new(kind),
        (None, None) => return Err(Error::Config("validate needs --config".into())),
    };
    if let Some(kind) = cli.command.kind() {
        if cfg.kind != kind {
            return Err(Error::Config(format!(
                "config describes a {} experiment, not {kind}",
                cfg.kind
            )));
        }
    }
    if let Some(dir) = &cli.out {
        cfg.output.dir = Some(dir.clone());
    }
    if cli.seed.is_some() {
        cfg.master_seed = cli.seed;
    }
    if cli.replicates.is_some() {
        cfg.replicates = cli.replicates;
    }
    Ok(cfg)
}

fn report(err: &Error) -> ExitCode {
    let violations = match err {
        Error::Validation(v) => serde_json::to_value(v).unwrap_or_default(),
        _ => serde_json::Value::Array(Vec::new()),
    };
    let body = serde_json::json!({
        "schema": experiment::SUMMARY_SCHEMA,
        "error": { "message": err.to_string(), "violations": violations },
    });
    eprintln!("{}", serde_json::to_string_pretty(&body).unwrap_or_else(|_| err.to_string()));
    ExitCode::from(if matches!(err, Error::Validation(_)) { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    if let Command::Validate = cli.command {
        return match cfg.resolve() {
            Ok(r) => {
                println!("{}", r.to_toml_string().unwrap_or_default());
                ExitCode::SUCCESS
            }
            Err(e) => report(&e),
        };
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return report(&Error::Config(e.to_string())),
    };
    match pool.install(|| experiment::run(&cfg)) {
        Ok((summary, files)) => {
            println!(
                "{} {}: {} / {}",
                summary.kind,
                if summary.pass { "pass" } else { "fail" },
                files.csv.display(),
                files.summary.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => report(&e),
    }
}
