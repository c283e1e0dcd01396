//! Evaluates the four basis functions along the molecular axis and checks
//! their analytic gradients against central differences.

use h2ion::basis::{eval_basis, BasisIndex, BasisParams, BasisSpec};
use h2ion::coords::Vec3;

fn main() -> h2ion::Result<()> {
    let params = BasisParams::default();
    let spec = BasisSpec::four_function(params);
    let r1 = Vec3::new(0.3, 0.2, -0.1);

    println!("values at r1 = (0.3, 0.2, -0.1), r2 = (ρ, 0, 0)");
    print!("{:>6}", "ρ");
    for idx in &spec.indices {
        print!("  {:>11}", format!("φ_{idx}"));
    }
    println!();
    for k in 0..9 {
        let rho = 0.8 + 0.05 * f64::from(k);
        print!("{rho:>6.2}");
        for idx in &spec.indices {
            print!("  {:>11.4e}", eval_basis(*idx, r1, Vec3::new(rho, 0.0, 0.0), &params)?.value);
        }
        println!();
    }

    let r2 = Vec3::new(0.9, 0.3, 0.2);
    let h = 1e-6;
    println!("\ngradient check at r2 = (0.9, 0.3, 0.2)");
    for idx in &spec.indices {
        let a = eval_basis(*idx, r1, r2, &params)?;
        let f = |r1: Vec3, r2: Vec3| eval_basis(*idx, r1, r2, &params).map(|s| s.value);
        let mut err: f64 = 0.0;
        for k in 0..3 {
            let d1 = (f(r1.shifted(k, h), r2)? - f(r1.shifted(k, -h), r2)?) / (2.0 * h);
            let d2 = (f(r1, r2.shifted(k, h))? - f(r1, r2.shifted(k, -h))?) / (2.0 * h);
            err = err.max((d1 - a.grad1.get(k)).abs()).max((d2 - a.grad2.get(k)).abs());
        }
        println!("φ_{idx}  parity {:?}  |∇2 φ| = {:.4e}  max FD error {err:.2e}", idx.parity(), a.grad2.norm());
    }

    let mirror = eval_basis(BasisIndex::new(1, 0), r1 * -1.0, r2 * -1.0, &params)?.value;
    let direct = eval_basis(BasisIndex::new(1, 0), r1, r2, &params)?.value;
    println!("\nφ_10 under inversion: {direct:.6e} -> {mirror:.6e}");
    Ok(())
}
