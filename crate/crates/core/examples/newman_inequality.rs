//! Joint vs. product characteristic function of the block sums against
//! the covariance bound.

use associated_clt::charfn::newman_check;
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::{BlockScheme, MCConfig};

fn main() -> associated_clt::Result<()> {
    let mc = MCConfig::new(50_000, 3);
    for (name, model) in [
        ("iid", MAModel::iid(InnovationLaw::exponential(1.0)?)?),
        ("geometric", MAModel::geometric(0.6, 12, InnovationLaw::exponential(1.0)?)?),
        ("(1, 1)", MAModel::new(vec![1.0, 1.0], InnovationLaw::pareto(4.0)?)?),
    ] {
        let scheme = BlockScheme::new(64, 0.5)?;
        let s_p = model.partial_sum_variance(scheme.block_len).sqrt();
        for scale in [0.5, 1.0, 2.0] {
            let t = vec![scale / s_p; scheme.block_count as usize];
            let c = newman_check(&model, &scheme, &t, &mc)?;
            println!(
                "{name:<10} t*s_p={scale}: |joint - product| {:.5} +- {:.5}, bound {:.5}, holds {}",
                c.lhs.value,
                c.lhs.stderr,
                c.rhs,
                c.holds(4.0)
            );
        }
    }
    Ok(())
}
