//! Grid search over the proton shell width and the electron exponent,
//! then a short simplex refinement from the best grid point.

use h2ion::driver::{optimize_parameters, SearchStrategy};
use h2ion::RunConfig;

fn main() -> h2ion::Result<()> {
    let mut config = RunConfig { n_samples: 1_000_000, ..RunConfig::default() };
    let grid = SearchStrategy::Grid {
        w_proton: vec![12.0, 18.0, 24.0],
        w_electron: vec![0.35, 0.45, 0.55],
        r0: vec![config.basis.r0],
    };
    let res = optimize_parameters(&config, &grid, 9)?;
    for e in &res.trace {
        let energy = e.energy.map_or("failed".into(), |v| format!("{v:.6}"));
        println!("w_p {:>5.1}  w_e {:>5.2}  E0 {energy}", e.params.w_proton, e.params.w_electron);
    }
    println!("grid best: {:?}, E0 = {:.6} ± {:.6}", res.best, res.best_energy, res.best_stderr);

    config.basis.w_proton = res.best.w_proton;
    config.basis.w_electron = res.best.w_electron;
    let simplex = SearchStrategy::Simplex { step: [4.0, 0.05, 0.05] };
    let refined = optimize_parameters(&config, &simplex, 20)?;
    println!(
        "simplex: {:?}, E0 = {:.6} ± {:.6}, converged {}",
        refined.best, refined.best_energy, refined.best_stderr, refined.converged
    );
    Ok(())
}
