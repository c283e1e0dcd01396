//! Importance-sampling densities on R⁶.
//!
//! The molecular proposal mimics `|φ_00|²`: `r2` has a uniformly random
//! direction and a radius drawn from a normal centered on the shell radius
//! (truncated at zero), and `r1` is an isotropic Gaussian around `+r2` or
//! `−r2`. Every returned point carries the exact normalized density.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use super::rng::RngStream;
use crate::basis::BasisParams;
use crate::coords::Vec3;
use crate::error::{Error, Result};
use crate::hamiltonian::SINGULARITY_GUARD;

/// Consecutive rejections after which a proposal is declared degenerate.
pub const MAX_CONSECUTIVE_REJECTIONS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub r1: Vec3,
    pub r2: Vec3,
    /// Proposal density at `(r1, r2)`.
    pub density: f64,
}

pub trait Proposal: Sync {
    /// Draws one non-singular point. `rejections` is incremented for every
    /// discarded candidate.
    fn draw(&self, rng: &mut RngStream, rejections: &mut u64) -> Result<SamplePoint>;

    /// Two points, each distributed exactly as [`draw`](Self::draw) but
    /// possibly correlated with each other. Defaults to independent draws.
    fn draw_pair(&self, rng: &mut RngStream, rejections: &mut u64) -> Result<[SamplePoint; 2]> {
        Ok([self.draw(rng, rejections)?, self.draw(rng, rejections)?])
    }

    fn density(&self, r1: Vec3, r2: Vec3) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalParams {
    pub shell_radius: f64,
    pub shell_sigma: f64,
    pub electron_sigma: f64,
    /// Probability of centering the electron on `+r2`.
    pub site_mix: f64,
    /// Draw radii in antithetic pairs sharing the electron offset; see
    /// [`MolecularProposal`].
    pub antithetic: bool,
}

impl ProposalParams {
    /// Densities matched to `|φ_00|²` for the given basis.
    pub fn for_basis(params: &BasisParams) -> Self {
        Self {
            shell_radius: params.r0,
            shell_sigma: 1.0 / (2.0 * params.w_proton.sqrt()),
            electron_sigma: 1.0 / (2.0 * params.w_electron.sqrt()),
            site_mix: 0.5,
            antithetic: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.shell_radius.is_finite() {
            return Err(Error::invalid("shell_radius must be finite"));
        }
        for (name, v) in [("shell_sigma", self.shell_sigma), ("electron_sigma", self.electron_sigma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.site_mix > 0.0 && self.site_mix < 1.0) {
            return Err(Error::invalid(format!("site_mix must lie in (0, 1), got {}", self.site_mix)));
        }
        Ok(())
    }
}

/// Optional per-field overrides of [`ProposalParams::for_basis`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProposalOverrides {
    pub shell_radius: Option<f64>,
    pub shell_sigma: Option<f64>,
    pub electron_sigma: Option<f64>,
    pub site_mix: Option<f64>,
    pub antithetic: Option<bool>,
}

impl ProposalOverrides {
    pub fn apply(&self, base: ProposalParams) -> ProposalParams {
        ProposalParams {
            shell_radius: self.shell_radius.unwrap_or(base.shell_radius),
            shell_sigma: self.shell_sigma.unwrap_or(base.shell_sigma),
            electron_sigma: self.electron_sigma.unwrap_or(base.electron_sigma),
            site_mix: self.site_mix.unwrap_or(base.site_mix),
            antithetic: self.antithetic.unwrap_or(base.antithetic),
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

fn gaussian3_density(d: Vec3, sigma: f64) -> f64 {
    let norm = (2.0 * PI * sigma * sigma).powf(-1.5);
    norm * (-d.norm_sq() / (2.0 * sigma * sigma)).exp()
}

/// Normal radial law truncated to `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal {
    pub mean: f64,
    pub sigma: f64,
    /// Probability mass of the untruncated normal on `(0, ∞)`.
    pub mass: f64,
}

impl TruncatedNormal {
    pub fn new(mean: f64, sigma: f64) -> Self {
        let mass = 0.5 * erfc(-mean / (sigma * std::f64::consts::SQRT_2));
        Self { mean, sigma, mass }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let z = (x - self.mean) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * PI).sqrt() * self.mass)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let phi = |t: f64| 0.5 * erfc(-(t - self.mean) / (self.sigma * std::f64::consts::SQRT_2));
        (phi(x) - phi(0.0)) / self.mass
    }

    /// Inverse CDF on `u ∈ (0, 1)`; each tail is computed from its own
    /// complement so neither loses precision.
    pub fn quantile(&self, u: f64) -> f64 {
        let below = 1.0 - self.mass;
        let z = if u < 0.5 {
            -std::f64::consts::SQRT_2 * erfc_inv(2.0 * (below + u * self.mass))
        } else {
            std::f64::consts::SQRT_2 * erfc_inv(2.0 * self.mass * (1.0 - u))
        };
        (self.mean + self.sigma * z).max(0.0)
    }

    fn sample(&self, rng: &mut RngStream, rejections: &mut u64) -> Result<f64> {
        let mut streak = 0u64;
        loop {
            let x = self.mean + self.sigma * rng.normal();
            if x > 0.0 {
                return Ok(x);
            }
            *rejections += 1;
            streak += 1;
            if streak >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::DegenerateProposal { rejections: streak });
            }
        }
    }
}

/// Proton shell times a two-site electron Gaussian mixture.
///
/// Antithetic pairs make the noise in couplings between `f_0` and
/// `f_2 = |r| − r0` largely cancel, since those integrands are odd in
/// `|r2| − r0` at fixed electron offset. The price is that the two points of
/// a pair carry the same electronic noise, which raises the variance of
/// radially even quantities such as the diagonal energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MolecularProposal {
    params: ProposalParams,
    radial: TruncatedNormal,
}

impl MolecularProposal {
    pub fn new(params: ProposalParams) -> Result<Self> {
        params.validate()?;
        let radial = TruncatedNormal::new(params.shell_radius, params.shell_sigma);
        if !(radial.mass > 0.0) {
            return Err(Error::DegenerateProposal { rejections: 0 });
        }
        Ok(Self { params, radial })
    }

    pub fn params(&self) -> &ProposalParams {
        &self.params
    }

    pub fn radial(&self) -> &TruncatedNormal {
        &self.radial
    }

    fn is_singular(r1: Vec3, r2: Vec3) -> bool {
        r2.norm() < SINGULARITY_GUARD
            || (r1 - r2).norm() < SINGULARITY_GUARD
            || (r1 + r2).norm() < SINGULARITY_GUARD
    }
}

impl Proposal for MolecularProposal {
    fn draw(&self, rng: &mut RngStream, rejections: &mut u64) -> Result<SamplePoint> {
        let p = &self.params;
        let mut streak = 0u64;
        loop {
            let rho = self.radial.sample(rng, rejections)?;
            let cos_t = 2.0 * rng.uniform() - 1.0;
            let phi = 2.0 * PI * rng.uniform();
            let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
            let r2 = Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t) * rho;
            let site = if rng.uniform() < p.site_mix { r2 } else { -r2 };
            let offset = Vec3::new(rng.normal(), rng.normal(), rng.normal()) * p.electron_sigma;
            let r1 = site + offset;
            if !Self::is_singular(r1, r2) {
                let density = self.density(r1, r2);
                if density > 0.0 {
                    return Ok(SamplePoint { r1, r2, density });
                }
            }
            *rejections += 1;
            streak += 1;
            if streak >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::DegenerateProposal { rejections: streak });
            }
        }
    }

    /// With `antithetic` set: radii at quantiles `u` and `1 − u`, sharing
    /// the direction, the electron site and the electron offset.
    fn draw_pair(&self, rng: &mut RngStream, rejections: &mut u64) -> Result<[SamplePoint; 2]> {
        let p = &self.params;
        if !p.antithetic {
            return Ok([self.draw(rng, rejections)?, self.draw(rng, rejections)?]);
        }
        let mut streak = 0u64;
        loop {
            let u = rng.uniform();
            let cos_t = 2.0 * rng.uniform() - 1.0;
            let phi = 2.0 * PI * rng.uniform();
            let plus = rng.uniform() < p.site_mix;
            let offset = Vec3::new(rng.normal(), rng.normal(), rng.normal()) * p.electron_sigma;
            if u > 0.0 {
                let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
                let e = Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t);
                let point = |rho: f64| {
                    let r2 = e * rho;
                    let r1 = if plus { r2 } else { -r2 } + offset;
                    let density = if Self::is_singular(r1, r2) { 0.0 } else { self.density(r1, r2) };
                    SamplePoint { r1, r2, density }
                };
                let pair = [point(self.radial.quantile(u)), point(self.radial.quantile(1.0 - u))];
                if pair.iter().all(|pt| pt.density > 0.0) {
                    return Ok(pair);
                }
            }
            *rejections += 1;
            streak += 1;
            if streak >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::DegenerateProposal { rejections: streak });
            }
        }
    }

    fn density(&self, r1: Vec3, r2: Vec3) -> f64 {
        let p = &self.params;
        let rho = r2.norm();
        if rho == 0.0 {
            return 0.0;
        }
        let g2 = self.radial.pdf(rho) / (4.0 * PI * rho * rho);
        let g1 = p.site_mix * gaussian3_density(r1 - r2, p.electron_sigma)
            + (1.0 - p.site_mix) * gaussian3_density(r1 + r2, p.electron_sigma);
        g2 * g1
    }
}

/// Isotropic Gaussian for the electron around a fixed nucleus at the
/// origin; `r2` is always zero. Used by the hydrogen self-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicProposal {
    pub sigma: f64,
}

impl AtomicProposal {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }
}

impl Proposal for AtomicProposal {
    fn draw(&self, rng: &mut RngStream, rejections: &mut u64) -> Result<SamplePoint> {
        let mut streak = 0u64;
        loop {
            let r1 = Vec3::new(rng.normal(), rng.normal(), rng.normal()) * self.sigma;
            if r1.norm() >= SINGULARITY_GUARD {
                return Ok(SamplePoint { r1, r2: Vec3::ZERO, density: self.density(r1, Vec3::ZERO) });
            }
            *rejections += 1;
            streak += 1;
            if streak >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::DegenerateProposal { rejections: streak });
            }
        }
    }

    fn density(&self, r1: Vec3, _r2: Vec3) -> f64 {
        gaussian3_density(r1, self.sigma)
    }
}

/// Draws one point from the molecular proposal.
pub fn sample_point(rng: &mut RngStream, prop: &ProposalParams) -> Result<SamplePoint> {
    let mut rejections = 0;
    MolecularProposal::new(*prop)?.draw(rng, &mut rejections)
}
