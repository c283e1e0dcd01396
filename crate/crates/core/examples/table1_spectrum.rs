//! The four-function spectrum with default parameters: ground state,
//! rotational and vibrational excitations, and the coefficient table.

use h2ion::{assemble_and_solve, RunConfig};

fn main() -> h2ion::Result<()> {
    let mut config = RunConfig::default();
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        config.n_samples = n;
    }
    let report = assemble_and_solve(&config)?;
    print!("{}", report.table());
    for (k, _) in report.eigenvalues.iter().enumerate() {
        println!("state {k} is dominated by φ_{}", report.dominant(k));
    }
    println!("sampling {:.2} s, solve {:.3} s", report.timing.estimate_seconds, report.timing.solve_seconds);
    Ok(())
}
