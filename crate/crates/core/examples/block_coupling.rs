//! Block decomposition of one sample path and a draw of independent
//! coupling blocks with the same marginal law.

use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::{block_sums, coupling_block_sums, sample_path, BlockScheme};

fn main() -> associated_clt::Result<()> {
    let model = MAModel::geometric(0.5, 48, InnovationLaw::exponential(1.0)?)?;
    let scheme = BlockScheme::new(1000, 0.5)?;
    println!(
        "n {} alpha {}: p = {}, m = {}, remainder {}",
        scheme.n, scheme.alpha, scheme.block_len, scheme.block_count, scheme.remainder_len
    );

    let path = sample_path(&model, scheme.n as usize, 7);
    let sums = block_sums(&path, &scheme)?;
    println!("dependent blocks (first 5): {:?}", &sums.blocks[..5]);
    println!("remainder {:.4}, total {:.4}, S_n {:.4}", sums.remainder, sums.total(), path.iter().sum::<f64>());

    let coupled = coupling_block_sums(&model, &scheme, 8);
    println!("coupling blocks (first 5): {:?}", &coupled[..5]);
    println!("Var Y_1 = s_p^2 = {:.4}", model.partial_sum_variance(scheme.block_len));
    Ok(())
}
