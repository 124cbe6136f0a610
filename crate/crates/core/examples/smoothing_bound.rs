//! Smoothing-inequality bound next to the Kolmogorov distance it controls,
//! and the coupling characteristic-function product against its Gaussian
//! counterpart.

use associated_clt::charfn::{
    cf_product_deviation, cf_product_envelope, esseen_distance_bound, SmoothingParameters,
    DEFAULT_LOG_EXPONENT,
};
use associated_clt::empirics::{ks_distance, normalized_sums};
use associated_clt::model::{InnovationLaw, MAModel};
use associated_clt::simulate::{BlockScheme, MCConfig};

fn main() -> associated_clt::Result<()> {
    let model = MAModel::geometric(0.5, 48, InnovationLaw::exponential(1.0)?)?;
    for n in [64, 256, 1024] {
        let xs = normalized_sums(&model, n, &MCConfig::new(4000, 1))?;
        let params = SmoothingParameters::for_blocks(n, 0.5, DEFAULT_LOG_EXPONENT)?;
        let bound = esseen_distance_bound(&xs, &params)?;
        println!(
            "n={n:<5} T {:.3}: KS {:.4} <= bound {bound:.4}",
            params.truncation,
            ks_distance(&xs)?
        );
    }

    let scheme = BlockScheme::new(4096, 0.5)?;
    for t in [0.5, 1.0, 2.0] {
        let dev = cf_product_deviation(&model, &scheme, t, &MCConfig::new(100_000, 2))?;
        println!(
            "t={t}: |phi^m - gaussian| {:.5} +- {:.5}, gaussian {:.4}, envelope shape {:.4}",
            dev.deviation.value,
            dev.deviation.stderr,
            dev.gaussian_target,
            cf_product_envelope(&model, &scheme, t, 3.0)
        );
    }
    Ok(())
}
