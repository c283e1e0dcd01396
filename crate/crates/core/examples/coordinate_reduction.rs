//! Reduces random three-body configurations to the two-particle coordinates
//! and shows how far the second proton sits from `-r2`.

use h2ion::coords::{reduce_coordinates, PhysicalConstants, ThreeBodyState, Vec3};
use h2ion::quadrature::RngStream;

fn main() -> h2ion::Result<()> {
    let constants = PhysicalConstants::default();
    let mut rng = RngStream::new(42, 0);
    let mut point = || Vec3::new(rng.normal(), rng.normal(), rng.normal()) * 2.0;

    println!("{:>10}  {:>10}  {:>12}  {:>14}", "|r1|", "|r2|", "|rc + r2|", "|rc+r2|/|r1|");
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let state = ThreeBodyState::hydrogen_molecule_ion(point(), point(), point(), &constants)?;
        let red = reduce_coordinates(&state)?;
        let rel = red.discrepancy / red.r1.norm();
        worst = worst.max(rel);
        println!("{:>10.5}  {:>10.5}  {:>12.3e}  {:>14.3e}", red.r1.norm(), red.r2.norm(), red.discrepancy, rel);
    }
    println!("largest relative discrepancy {worst:.3e}, 1/m_p = {:.3e}", 1.0 / constants.proton_electron_mass_ratio);
    Ok(())
}
