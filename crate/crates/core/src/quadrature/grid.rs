//! Deterministic tensor-product Gauss-Legendre quadrature.
//!
//! [`integrate_box`] is the plain Cartesian rule on `[−L, L]⁶`. It cannot
//! resolve the thin proton shell or the moving Coulomb singularities, so
//! [`grid_reference`] uses adapted coordinates instead:
//!
//! - `r2` in spherical coordinates, radius restricted to the window where
//!   the squared shell factor exceeds `e^{−36}`,
//! - `r1` in prolate spheroidal coordinates `(λ, μ, ϕ)` with foci at `±r2`;
//!   the Jacobian `ρ³(λ² − μ²)` cancels both electron-proton singularities.
//!   `λ` runs up to `1 + L/ρ`, so the region contains every point within `L`
//!   of either proton.
//!
//! Every axis carries the same number of Gauss-Legendre nodes.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::estimate::{compensated_sum, MatrixIntegrand};
use crate::basis::{BasisSpec, TwoParticleSample};
use crate::coords::Vec3;
use crate::eigensolver::SymMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianParams;

/// Default cap on integrand evaluations: every allowed node count fits.
pub const DEFAULT_GRID_BUDGET: u64 = 32u64.pow(6);

/// `2 w_proton (ρ − r0)²` at the edge of the radial window.
const SHELL_WINDOW_EXPONENT: f64 = 36.0;

/// Gauss-Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp;
        loop {
            // P_n(z) by the three-term recurrence, then P_n'(z)
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn on(n: usize, a: f64, b: f64) -> Self {
        let (x, w) = gauss_legendre(n);
        let (half, mid) = (0.5 * (b - a), 0.5 * (b + a));
        Self {
            nodes: x.iter().map(|t| half * t + mid).collect(),
            weights: w.iter().map(|t| half * t).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

fn check_budget(nodes_per_dim: usize, budget: u64) -> Result<()> {
    let requested = (nodes_per_dim as u64).saturating_pow(6);
    if requested > budget {
        return Err(Error::ResourceLimit { requested, budget });
    }
    Ok(())
}

/// Cartesian tensor-product rule for `∫ f(r1, r2)` over `[−L, L]⁶`.
pub fn integrate_box<F>(f: F, nodes_per_dim: usize, half_width: f64, budget: u64) -> Result<f64>
where
    F: Fn(Vec3, Vec3) -> f64 + Sync,
{
    if nodes_per_dim == 0 || !(half_width > 0.0) {
        return Err(Error::invalid("need at least one node and a positive half-width"));
    }
    check_budget(nodes_per_dim, budget)?;
    let rule = Rule::on(nodes_per_dim, -half_width, half_width);
    let n = nodes_per_dim;
    let outer: Vec<f64> = (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b, c) = (k / (n * n), (k / n) % n, k % n);
            let r2 = Vec3::new(rule.nodes[a], rule.nodes[b], rule.nodes[c]);
            let w2 = rule.weights[a] * rule.weights[b] * rule.weights[c];
            let mut s = 0.0;
            for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
                for (y, wy) in rule.nodes.iter().zip(&rule.weights) {
                    for (z, wz) in rule.nodes.iter().zip(&rule.weights) {
                        s += wx * wy * wz * f(Vec3::new(*x, *y, *z), r2);
                    }
                }
            }
            w2 * s
        })
        .collect();
    Ok(compensated_sum(outer))
}

/// Unit vectors completing `e` to a right-handed orthonormal frame.
fn perpendicular_frame(e: Vec3) -> (Vec3, Vec3) {
    let t = if e.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
    let cross = |a: Vec3, b: Vec3| Vec3::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);
    let e1 = cross(e, t);
    let e1 = e1 / e1.norm();
    (e1, cross(e, e1))
}

/// `(H, S)` by deterministic quadrature; see the module docs for the
/// coordinates. Slow, intended for bases of a handful of functions.
pub fn grid_reference(
    spec: &BasisSpec,
    hp: &HamiltonianParams,
    nodes_per_dim: usize,
    box_half_width: f64,
) -> Result<(SymMatrix, SymMatrix)> {
    grid_reference_with_budget(spec, hp, nodes_per_dim, box_half_width, DEFAULT_GRID_BUDGET)
}

pub fn grid_reference_with_budget(
    spec: &BasisSpec,
    hp: &HamiltonianParams,
    nodes_per_dim: usize,
    box_half_width: f64,
    budget: u64,
) -> Result<(SymMatrix, SymMatrix)> {
    spec.validate()?;
    hp.validate()?;
    if !(8..=32).contains(&nodes_per_dim) {
        return Err(Error::invalid(format!("nodes_per_dim {nodes_per_dim} outside [8, 32]")));
    }
    if !(box_half_width >= 4.0) {
        return Err(Error::invalid(format!("box half-width {box_half_width} below 4 bohr")));
    }
    check_budget(nodes_per_dim, budget)?;

    let n = nodes_per_dim;
    let p = &spec.params;
    let window = (SHELL_WINDOW_EXPONENT / (2.0 * p.w_proton)).sqrt();
    let rho_rule = Rule::on(n, (p.r0 - window).max(0.0), (p.r0 + window).min(box_half_width));
    let cos_rule = Rule::on(n, -1.0, 1.0);
    let phi_rule = Rule::on(n, 0.0, 2.0 * PI);
    let mu_rule = Rule::on(n, -1.0, 1.0);
    let integrand = MatrixIntegrand { spec, hamiltonian: hp };
    let n_out = integrand.n_outputs();

    let outer: Vec<Result<Vec<f64>>> = (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b, c) = (k / (n * n), (k / n) % n, k % n);
            let rho = rho_rule.nodes[a];
            let cos_t = cos_rule.nodes[b];
            let sin_t = (1.0 - cos_t * cos_t).sqrt();
            let phi = phi_rule.nodes[c];
            let e = Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t);
            let r2 = e * rho;
            let w2 = rho_rule.weights[a] * cos_rule.weights[b] * phi_rule.weights[c] * rho * rho;
            let (e1, e2) = perpendicular_frame(e);
            let lam_rule = Rule::on(n, 1.0, 1.0 + box_half_width / rho);

            let mut samples = vec![TwoParticleSample::default(); spec.len()];
            let mut buf = vec![0.0; n_out];
            let mut acc = vec![0.0; n_out];
            for (lam, wl) in lam_rule.nodes.iter().zip(&lam_rule.weights) {
                for (mu, wm) in mu_rule.nodes.iter().zip(&mu_rule.weights) {
                    let jac = rho.powi(3) * (lam * lam - mu * mu);
                    let perp = rho * ((lam * lam - 1.0) * (1.0 - mu * mu)).sqrt();
                    for (ph, wp) in phi_rule.nodes.iter().zip(&phi_rule.weights) {
                        let r1 = e * (rho * lam * mu) + (e1 * ph.cos() + e2 * ph.sin()) * perp;
                        integrand.eval(r1, r2, &mut samples, &mut buf)?;
                        let w = wl * wm * wp * jac;
                        for (acc, v) in acc.iter_mut().zip(&buf) {
                            *acc += w * v;
                        }
                    }
                }
            }
            Ok(acc.into_iter().map(|v| v * w2).collect())
        })
        .collect();

    let mut columns = vec![Vec::with_capacity(outer.len()); n_out];
    for r in outer {
        for (col, v) in columns.iter_mut().zip(r?) {
            col.push(v);
        }
    }
    let totals: Vec<f64> = columns.into_iter().map(compensated_sum).collect();
    Ok(integrand.unpack(&totals))
}
