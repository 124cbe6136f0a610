//! Probability that the remainder block exceeds n^{-3α/8} s_n.

use associated_clt::empirics::{remainder_tail, remainder_threshold};
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::{BlockScheme, MCConfig};
use associated_clt::special::normal_sf;

fn main() -> associated_clt::Result<()> {
    let model = MAModel::geometric(0.5, 48, InnovationLaw::gaussian())?;
    let mc = MCConfig::new(100_000, 5);
    for n in [1000, 1024, 10_000, 100_000] {
        let scheme = BlockScheme::new(n, 0.5)?;
        let p = remainder_tail(&model, &scheme, &mc)?;
        let exact = if scheme.remainder_len == 0 {
            0.0
        } else {
            let s = model.partial_sum_variance(scheme.remainder_len).sqrt();
            2.0 * normal_sf(remainder_threshold(&model, &scheme) / s)
        };
        println!(
            "n={n:<6} remainder length {:<4} P = {:.5} +- {:.5} (gaussian exact {exact:.5})",
            scheme.remainder_len, p.value, p.stderr
        );
    }
    Ok(())
}
