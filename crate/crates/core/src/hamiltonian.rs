//! Reduced two-particle Hamiltonian in atomic units:
//!
//! ```text
//! H = −½ Δ1 − 1/(4 m_p) Δ2 + 1/(2|r2|) − 1/|r1 + r2| − 1/|r1 − r2|
//! ```
//!
//! Kinetic matrix elements are evaluated in the integrated-by-parts form
//! `½ ∇1φ_i·∇1φ_j + 1/(4 m_p) ∇2φ_i·∇2φ_j`, which only needs first
//! derivatives and is symmetric in `(i, j)` point by point. The literal
//! second-derivative form is kept as a finite-difference oracle,
//! [`local_energy_laplacian`].

use serde::{Deserialize, Serialize};

use crate::basis::{eval_basis, BasisIndex, BasisParams, BasisSpec, TwoParticleSample};
use crate::coords::{Vec3, PROTON_ELECTRON_MASS_RATIO};
use crate::error::{Error, Result};

/// Distance below which a Coulomb denominator counts as singular.
pub const SINGULARITY_GUARD: f64 = 1e-12;

/// Largest tolerated roundoff of the Laplacian stencil, relative to the
/// function scale.
pub const LAPLACIAN_ROUNDOFF_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianParams {
    /// Proton mass in electron masses.
    pub m_p: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        Self { m_p: PROTON_ELECTRON_MASS_RATIO }
    }
}

impl HamiltonianParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_p > 0.0 && self.m_p.is_finite()) {
            return Err(Error::invalid(format!("proton mass must be positive, got {}", self.m_p)));
        }
        Ok(())
    }

    /// Prefactor of the electron kinetic term.
    pub fn electron_weight(&self) -> f64 {
        0.5
    }

    /// Prefactor of the `r2` kinetic term; the moving mass is `2 m_p`.
    pub fn proton_weight(&self) -> f64 {
        1.0 / (4.0 * self.m_p)
    }
}

/// Coulomb energy of the reduced system.
pub fn potential(r1: Vec3, r2: Vec3) -> Result<f64> {
    let d_pp = r2.norm();
    let d_plus = (r1 + r2).norm();
    let d_minus = (r1 - r2).norm();
    if d_pp < SINGULARITY_GUARD {
        return Err(Error::SingularPoint("proton-proton coalescence"));
    }
    if d_plus < SINGULARITY_GUARD || d_minus < SINGULARITY_GUARD {
        return Err(Error::SingularPoint("electron-proton coalescence"));
    }
    Ok(0.5 / d_pp - 1.0 / d_plus - 1.0 / d_minus)
}

pub fn kinetic_integrand(a: &TwoParticleSample, b: &TwoParticleSample, params: &HamiltonianParams) -> f64 {
    params.electron_weight() * a.grad1.dot(b.grad1) + params.proton_weight() * a.grad2.dot(b.grad2)
}

pub fn hamiltonian_integrand(
    i: BasisIndex,
    j: BasisIndex,
    r1: Vec3,
    r2: Vec3,
    spec: &BasisSpec,
    params: &HamiltonianParams,
) -> Result<f64> {
    let v = potential(r1, r2)?;
    let a = eval_basis(i, r1, r2, &spec.params)?;
    let b = eval_basis(j, r1, r2, &spec.params)?;
    Ok(kinetic_integrand(&a, &b, params) + a.value * v * b.value)
}

pub fn overlap_integrand(i: BasisIndex, j: BasisIndex, r1: Vec3, r2: Vec3, spec: &BasisSpec) -> Result<f64> {
    let a = eval_basis(i, r1, r2, &spec.params)?;
    let b = eval_basis(j, r1, r2, &spec.params)?;
    Ok(a.value * b.value)
}

/// Second-order central-difference estimate of
/// `(−½ Δ1 − 1/(4 m_p) Δ2) f` at `(r1, r2)`.
pub fn kinetic_laplacian_fd<F>(f: F, r1: Vec3, r2: Vec3, params: &HamiltonianParams, h: f64) -> Result<f64>
where
    F: Fn(Vec3, Vec3) -> Result<f64>,
{
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::invalid(format!("finite-difference step {h:e} outside [1e-6, 1e-2]")));
    }
    let center = f(r1, r2)?;
    let mut scale = center.abs();
    let mut second_diff = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let fp = g(h)?;
        let fm = g(-h)?;
        scale = scale.max(fp.abs()).max(fm.abs());
        Ok(fp - 2.0 * center + fm)
    };
    let mut lap1 = 0.0;
    let mut lap2 = 0.0;
    for k in 0..3 {
        lap1 += second_diff(&|d| f(r1.shifted(k, d), r2))?;
        lap2 += second_diff(&|d| f(r1, r2.shifted(k, d)))?;
    }
    let (we, wp) = (params.electron_weight(), params.proton_weight());
    let result = -(we * lap1 + wp * lap2) / (h * h);

    let roundoff = 4.0 * f64::EPSILON * scale * 3.0 * (we + wp) / (h * h);
    if roundoff > LAPLACIAN_ROUNDOFF_TOL * scale.max(result.abs()) {
        return Err(Error::StepTooSmall { h, roundoff });
    }
    Ok(result)
}

/// Kinetic operator applied to one unnormalized basis function by finite
/// differences.
pub fn local_energy_laplacian(
    idx: BasisIndex,
    r1: Vec3,
    r2: Vec3,
    basis: &BasisParams,
    params: &HamiltonianParams,
    h: f64,
) -> Result<f64> {
    if idx.is_singular_at_origin() && r2.norm() <= 10.0 * h {
        return Err(Error::SingularPoint("stencil reaches x/|r| singularity"));
    }
    kinetic_laplacian_fd(|a, b| Ok(eval_basis(idx, a, b, basis)?.value), r1, r2, params, h)
}
