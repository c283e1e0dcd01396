//! Hydrogen atom with one Gaussian: Monte-Carlo energy against the closed
//! form over a range of exponents.

use h2ion::driver::{closed_form_energy, hydrogen_gaussian_selftest, OPTIMAL_ALPHA};

fn main() -> h2ion::Result<()> {
    println!("{:>8}  {:>11}  {:>9}  {:>11}  {:>6}", "alpha", "E (MC)", "stderr", "exact", "z");
    for factor in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let r = hydrogen_gaussian_selftest(factor * OPTIMAL_ALPHA, 400_000, 20, 1)?;
        println!(
            "{:>8.4}  {:>11.6}  {:>9.6}  {:>11.6}  {:>6.2}",
            r.alpha,
            r.energy,
            r.stderr,
            r.exact,
            r.z_score()
        );
    }
    println!("minimum {:.6} at alpha = 8/(9π) = {OPTIMAL_ALPHA:.6}", closed_form_energy(OPTIMAL_ALPHA));
    Ok(())
}
