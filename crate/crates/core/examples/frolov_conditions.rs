//! Moment and truncation quantities of the coupling-block array.

use associated_clt::empirics::{frolov_sweep, l_n_slope};
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::rates::frolov_block_threshold;
use associated_clt::simulate::MCConfig;

fn main() -> associated_clt::Result<()> {
    let model = MAModel::geometric(0.5, 48, InnovationLaw::exponential(1.0)?)?;
    let (alpha, q) = (0.5, 3.0);
    let grid: Vec<u64> = (8..=14).map(|e| 1 << e).collect();
    println!("lambda threshold alpha(q-2) = {}", frolov_block_threshold(alpha, q)?);
    for lambda in [0.25, 1.0] {
        let diags = frolov_sweep(&model, alpha, &grid, q, lambda, &MCConfig::new(50_000, 9))?;
        println!("lambda {lambda}: log L_n slope {:+.3}", l_n_slope(&diags).unwrap_or(f64::NAN));
        for d in &diags {
            println!(
                "  n={:<6} B_n {:>9.1} L_n {:.4} Lambda(0.5) {:.3e} Lambda(1) {:.3e} e6 {:?}",
                d.scheme.n,
                d.b_n,
                d.l_n,
                d.lambda_fn[0].value.value,
                d.lambda_fn[1].value.value,
                d.e6
            );
        }
    }
    Ok(())
}
