//! Deterministic quadrature of the matrices at increasing resolution,
//! compared with a Monte-Carlo estimate. Slow: the 24-node rule takes
//! about a minute on one core.

use h2ion::quadrature::{estimate_matrices, grid_reference, ProposalParams};
use h2ion::{BasisParams, BasisSpec, HamiltonianParams};

fn main() -> h2ion::Result<()> {
    let spec = BasisSpec::four_function(BasisParams::default());
    let hp = HamiltonianParams::default();
    let mc = estimate_matrices(&spec, &hp, &ProposalParams::for_basis(&spec.params), 2_000_000, 20, 1)?;

    println!("{:>6}  {:>10}  {:>10}  {:>10}  {:>11}", "nodes", "S00", "S13", "S22", "H00");
    for nodes in [12, 16, 20, 24] {
        let (h, s) = grid_reference(&spec, &hp, nodes, 6.0)?;
        println!("{nodes:>6}  {:>10.5}  {:>10.5}  {:>10.5}  {:>11.5}", s.get(0, 0), s.get(1, 3), s.get(2, 2), h.get(0, 0));
    }
    println!(
        "{:>6}  {:>10.5}  {:>10.5}  {:>10.5}  {:>11.5}",
        "MC",
        mc.s.get(0, 0),
        mc.s.get(1, 3),
        mc.s.get(2, 2),
        mc.h.get(0, 0)
    );
    println!(
        "{:>6}  {:>10.5}  {:>10.5}  {:>10.5}  {:>11.5}",
        "± SE",
        mc.s_stderr.get(0, 0),
        mc.s_stderr.get(1, 3),
        mc.s_stderr.get(2, 2),
        mc.h_stderr.get(0, 0)
    );
    Ok(())
}
