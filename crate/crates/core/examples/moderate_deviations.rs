//! P(S_n > x_n s_n) / (1 - Φ(x_n)) at x_n = sqrt(λ log n).

use associated_clt::empirics::moddev_ratio;
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::MCConfig;

fn main() -> associated_clt::Result<()> {
    let mc = MCConfig::new(1_000_000, 17);
    // pareto partial sums are drawn term by term, so that model gets a smaller n
    for (name, model, n) in [
        ("iid gaussian", MAModel::iid(InnovationLaw::gaussian())?, 10_000),
        ("geometric exponential", MAModel::geometric(0.5, 48, InnovationLaw::exponential(1.0)?)?, 10_000),
        ("iid pareto 3.5", MAModel::iid(InnovationLaw::pareto(3.5)?)?, 100),
    ] {
        for lambda in [0.25, 0.5, 1.0] {
            let e = moddev_ratio(&model, n, lambda, &mc)?;
            println!(
                "{name:<22} n {n:<6} lambda {lambda:<4} x_n {:.3}: ratio {:.4} +- {:.4} (in regime: {})",
                e.x_n, e.ratio.value, e.ratio.stderr, e.in_regime
            );
        }
    }
    if let Err(e) = moddev_ratio(&MAModel::iid(InnovationLaw::gaussian())?, 10_000, 4.0, &MCConfig::new(10_000, 1)) {
        println!("too few replicates: {e}");
    }
    Ok(())
}
