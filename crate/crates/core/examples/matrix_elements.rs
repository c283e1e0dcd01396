//! Monte-Carlo estimates of the Hamiltonian and overlap matrices with their
//! block-jackknife errors.

use h2ion::quadrature::{estimate_matrices, ProposalParams};
use h2ion::{BasisParams, BasisSpec, HamiltonianParams};

fn main() -> h2ion::Result<()> {
    let n_samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let spec = BasisSpec::four_function(BasisParams::default());
    let hp = HamiltonianParams::default();
    let prop = ProposalParams::for_basis(&spec.params);
    let est = estimate_matrices(&spec, &hp, &prop, n_samples, 20, 1)?;

    for (name, m, se) in [("S", &est.s, &est.s_stderr), ("H", &est.h, &est.h_stderr)] {
        println!("{name} ({} samples, {} blocks)", est.n_samples, est.n_blocks);
        for i in 0..est.n {
            for j in 0..est.n {
                print!("  {:>11.5} ± {:<8.5}", m.get(i, j), se.get(i, j));
            }
            println!();
        }
    }
    println!("draws accepted {}, rejected {}", est.accepted_draws, est.rejected_draws);
    Ok(())
}
