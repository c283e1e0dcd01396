//! Gradient-form kinetic matrix against the finite-difference Laplacian
//! form, both from one shared sample.

use h2ion::driver::kinetic_form_comparison;
use h2ion::quadrature::{ProposalParams, SamplingPlan};
use h2ion::{BasisParams, BasisSpec, HamiltonianParams};

fn main() -> h2ion::Result<()> {
    let spec = BasisSpec::four_function(BasisParams::default());
    let prop = ProposalParams::for_basis(&spec.params);
    let plan = SamplingPlan::new(200_000, 20, 3)?;
    let k = kinetic_form_comparison(&spec, &HamiltonianParams::default(), &prop, plan, 1e-4)?;
    println!("{:>4}  {:>12}  {:>12}  {:>10}", "ij", "gradient", "laplacian", "diff / SE");
    for i in 0..k.n {
        for j in 0..k.n {
            let m = i * k.n + j;
            let z = (k.gradient[m] - k.laplacian[m]) / k.difference_stderr[m];
            println!("{:>4}  {:>12.5}  {:>12.5}  {z:>10.2}", format!("{i}{j}"), k.gradient[m], k.laplacian[m]);
        }
    }
    println!("max |z| = {:.2}", k.max_z());
    Ok(())
}
