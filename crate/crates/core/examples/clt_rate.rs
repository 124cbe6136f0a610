//! Kolmogorov distance of S_n/s_n to the normal law along n, with the fitted
//! log-log slope next to the theoretical exponent.

use associated_clt::empirics::{clt_rate_experiment_with, ks_noise_floor, RateOptions};
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::MCConfig;

fn main() -> associated_clt::Result<()> {
    let grid: Vec<u64> = (6..=12).map(|e| 1 << e).collect();
    let mc = MCConfig::new(200_000, 2024);
    println!("KS noise floor {:.5}", ks_noise_floor(mc.replicates));
    for (name, model) in [
        ("iid gaussian", MAModel::iid(InnovationLaw::gaussian())?),
        ("iid exponential", MAModel::iid(InnovationLaw::exponential(1.0)?)?),
        ("geometric exponential", MAModel::geometric(0.5, 48, InnovationLaw::exponential(1.0)?)?),
    ] {
        let res = clt_rate_experiment_with(&model, &grid, &mc, &RateOptions::default())?;
        println!(
            "{name}: slope {:+.3}, bound exponent {:.4} (q {}, theta {:?})",
            res.fitted_slope, res.theoretical_exponent, res.q, res.theta
        );
        for (n, d) in grid.iter().zip(&res.distances) {
            println!("  n={n:<5} {d:.5}");
        }
    }
    Ok(())
}
