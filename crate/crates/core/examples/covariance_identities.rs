//! Exact second-order quantities of a moving-average model and the two
//! covariance identities behind the block decomposition.

use associated_clt::charfn::block_covariance_identity;
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::BlockScheme;

fn main() -> associated_clt::Result<()> {
    let models = [
        ("geometric rho=0.5", MAModel::geometric(0.5, 48, InnovationLaw::exponential(1.0)?)?),
        ("power beta=1.5", MAModel::power(1.5, 200, InnovationLaw::gaussian())?),
        ("iid pareto", MAModel::iid(InnovationLaw::pareto(3.5)?)?),
    ];
    for (name, m) in &models {
        let p = m.profile()?;
        println!("{name}: sigma1^2 {:.5}, sigma^2 {:.5}, theta {:?}, delta {:?}", p.sigma1_sq, p.sigma_sq, p.theta, p.delta);
        for n in [10, 100, 1000] {
            let (gap, rhs) = m.variance_gap_identity(n)?;
            println!(
                "  n={n:<5} s_n^2 {:>12.4}  u(n) {:.3e}  sigma^2 - s_n^2/n {gap:.6e}  2u(n) + (2/n) sum j c_j {rhs:.6e}",
                m.partial_sum_variance(n),
                m.cox_grimmett(n)
            );
        }
        let s = BlockScheme::new(1000, 0.5)?;
        let (lhs, rhs) = block_covariance_identity(m, &s)?;
        println!("  blocks p={} m={}: sum_(j>k) Cov(Y_j, Y_k) {lhs:.6e} = {rhs:.6e}", s.block_len, s.block_count);
    }
    Ok(())
}
