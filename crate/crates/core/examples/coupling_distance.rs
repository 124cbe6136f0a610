//! Two-sample distance between the dependent block sum and the sum of
//! independent coupling blocks.

use associated_clt::empirics::{coupling_distance, ks_two_sample_noise_floor};
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::{BlockScheme, MCConfig};

fn main() -> associated_clt::Result<()> {
    let r = 50_000;
    let mc = MCConfig::new(r, 11);
    println!("noise floor {:.5}", ks_two_sample_noise_floor(r, r));
    for (name, model) in [
        ("geometric rho=0.5", MAModel::geometric(0.5, 48, InnovationLaw::exponential(1.0)?)?),
        ("geometric rho=0.9", MAModel::geometric(0.9, 200, InnovationLaw::exponential(1.0)?)?),
        ("iid", MAModel::iid(InnovationLaw::exponential(1.0)?)?),
    ] {
        for n in [256, 1024, 4096] {
            let scheme = BlockScheme::new(n, 0.5)?;
            let d = coupling_distance(&model, &scheme, &mc.derived(n))?;
            println!("{name:<18} n={n:<5} {d:.5}");
        }
    }
    Ok(())
}
