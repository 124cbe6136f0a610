//! Runs an experiment described in TOML, the same way the binary does, and
//! shows the validation report for a config that breaks θ > 1 + λ.

use associated_clt::experiment::{self, ExperimentConfig};
use associated_clt::Error;

const CONFIG: &str = r#"
kind = "coupling"
n_grid = [256, 1024]
replicates = 20000
master_seed = 3

[model]
family = "geometric"
rho = 0.5
k = 48
innovation = { kind = "centered-exponential", rate = 1.0 }

[output]
dir = "target/example-out"
"#;

fn main() -> associated_clt::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let (summary, files) = experiment::run(&cfg)?;
    println!("wrote {} and {}", files.csv.display(), files.summary.display());
    for c in &summary.checks {
        println!("  {}: {} ({})", c.name, c.pass, c.detail);
    }
    println!("resolved config:\n{}", summary.resolved_config.to_toml_string()?);

    let mut bad = cfg.clone();
    bad.kind = experiment::ExperimentKind::Moddev;
    bad.lambda = Some(0.5);
    match bad.resolve() {
        Err(Error::Validation(v)) => v.iter().for_each(|x| println!("violation {x}")),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
