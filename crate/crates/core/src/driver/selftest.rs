//! Hydrogen atom with a single Gaussian trial function, for which the
//! variational energy is known in closed form. Exercises the Monte-Carlo
//! machinery, the kinetic form and the Coulomb term on a case with an exact
//! answer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::basis::TwoParticleSample;
use crate::error::{Error, Result};
use crate::hamiltonian::{kinetic_integrand, HamiltonianParams};
use crate::quadrature::{integrate, jackknife, AtomicProposal, SamplingPlan};

/// Minimizer of [`closed_form_energy`].
pub const OPTIMAL_ALPHA: f64 = 8.0 / (9.0 * PI);

/// `⟨e^{-αr²}|H|e^{-αr²}⟩ / ⟨e^{-αr²}|e^{-αr²}⟩ = 3α/2 − 2√(2α/π)`.
pub fn closed_form_energy(alpha: f64) -> f64 {
    1.5 * alpha - 2.0 * (2.0 * alpha / PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfTestResult {
    pub alpha: f64,
    pub energy: f64,
    pub stderr: f64,
    pub exact: f64,
}

impl SelfTestResult {
    /// Deviation from the closed form in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.energy - self.exact).abs() / self.stderr
    }
}

/// Samples from `N(0, σ² = 1/(4α))`, whose density is proportional to
/// `φ²` and gives a near zero-variance estimator.
pub fn hydrogen_gaussian_selftest(alpha: f64, n_samples: usize, n_blocks: usize, seed: u64) -> Result<SelfTestResult> {
    hydrogen_gaussian_selftest_with(alpha, 0.5 / alpha.sqrt(), n_samples, n_blocks, seed)
}

/// As [`hydrogen_gaussian_selftest`] with an explicit sampling width.
pub fn hydrogen_gaussian_selftest_with(
    alpha: f64,
    sigma: f64,
    n_samples: usize,
    n_blocks: usize,
    seed: u64,
) -> Result<SelfTestResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let plan = SamplingPlan::new(n_samples, n_blocks, seed)?;
    let proposal = AtomicProposal::new(sigma)?;
    let hp = HamiltonianParams::default();
    let est = integrate(&proposal, 2, plan, |pt, out| {
        let r = pt.r1;
        let value = (-alpha * r.norm_sq()).exp();
        let a = TwoParticleSample { value, grad1: r * (-2.0 * alpha * value), ..Default::default() };
        out[0] = value * value;
        out[1] = kinetic_integrand(&a, &a, &hp) - value * value / r.norm();
        Ok(())
    })?;
    let mean = est.mean();
    let ratios: Vec<f64> = est.replicas().iter().map(|r| r[1] / r[0]).collect();
    Ok(SelfTestResult {
        alpha,
        energy: mean[1] / mean[0],
        stderr: jackknife(&ratios).1,
        exact: closed_form_energy(alpha),
    })
}
