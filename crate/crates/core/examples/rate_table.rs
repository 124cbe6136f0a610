//! Closed-form rate exponents, the blocking-exponent optimizer, the remainder
//! variant with threshold n^{-μα}, and the moderate-deviation windows.

use associated_clt::rates::{
    clt_rate_exponent, component_exponents, moddev_windows, mu_generalized_rate, optimal_alpha,
};

fn main() -> associated_clt::Result<()> {
    println!("{:>5} {:>5} {:>9} {:>7} {:>9}", "q", "theta", "exponent", "regime", "alpha*");
    for q in [2.2, 2.5, 8.0 / 3.0, 2.8, 3.0, 4.0] {
        for theta in [0.5, 1.0, 2.0, 4.0] {
            let b = clt_rate_exponent(q, theta)?;
            println!(
                "{q:>5.3} {theta:>5.1} {:>9.5} {:>7} {:>9.5}",
                b.exponent,
                b.regime.label(),
                b.alpha_star
            );
        }
    }

    let (alpha, e) = optimal_alpha(3.0, 1.0)?;
    println!("\noptimizer at q=3, theta=1: alpha {alpha:.6}, exponent {e:.6} (3/19 = {:.6})", 3.0 / 19.0);
    for (name, piece) in component_exponents(alpha, 3.0, 1.0)?.labeled() {
        println!("  {name:<15} {piece:?}");
    }

    let (e, interval) = mu_generalized_rate(0.25, 1.0)?;
    println!("\nmu = 1/4, theta = 1: exponent {e:.6}, valid q in {interval:?}");

    for (q, theta, lambda) in [(3.0, 4.0, 0.5), (3.0, 1.0, 0.5)] {
        let w = moddev_windows(q, theta, lambda)?;
        println!(
            "moderate deviations q={q} theta={theta} lambda={lambda}: feasible {}, alpha in {:?}, epsilon in {:?}",
            w.feasible, w.alpha_window, w.epsilon_window
        );
    }
    Ok(())
}
