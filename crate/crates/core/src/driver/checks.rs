//! Oracle and property checks behind the `check` subcommand.

use serde::{Deserialize, Serialize};

use super::selftest::{hydrogen_gaussian_selftest, OPTIMAL_ALPHA};
use crate::basis::{eval_basis, BasisParams, BasisSpec};
use crate::coords::Vec3;
use crate::eigensolver::{solve_generalized, SymMatrix, DEFAULT_TOL};
use crate::error::Result;
use crate::hamiltonian::{kinetic_integrand, local_energy_laplacian, HamiltonianParams};
use crate::quadrature::{
    estimate_matrices, grid_reference, integrate, sample_point, MolecularProposal, ProposalParams,
    RngStream, SamplingPlan,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub seed: u64,
    pub gradient_points: usize,
    pub grid_nodes: usize,
    pub box_half_width: f64,
    pub grid_mc_samples: usize,
    pub hydrogen_samples: usize,
    pub kinetic_samples: usize,
    pub eigen_pairs: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            gradient_points: 1000,
            grid_nodes: 24,
            box_half_width: 6.0,
            grid_mc_samples: 1_000_000,
            hydrogen_samples: 1_000_000,
            kinetic_samples: 200_000,
            eigen_pairs: 200,
        }
    }
}

impl CheckOptions {
    /// Small sizes for smoke tests.
    pub fn quick() -> Self {
        Self {
            gradient_points: 200,
            grid_nodes: 20,
            grid_mc_samples: 100_000,
            hydrogen_samples: 100_000,
            kinetic_samples: 40_000,
            eigen_pairs: 40,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

/// Gradient-form and finite-difference Laplacian-form kinetic matrices
/// estimated from one shared sample. Matrices are full `n × n`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticComparison {
    pub n: usize,
    pub gradient: Vec<f64>,
    pub laplacian: Vec<f64>,
    pub gradient_stderr: Vec<f64>,
    pub laplacian_stderr: Vec<f64>,
    /// Jackknife error of `gradient − laplacian`, which accounts for the
    /// correlation between the two forms.
    pub difference_stderr: Vec<f64>,
}

impl KineticComparison {
    /// Largest `|gradient − laplacian|` in units of the difference error.
    pub fn max_z(&self) -> f64 {
        (0..self.n * self.n)
            .map(|k| (self.gradient[k] - self.laplacian[k]).abs() / self.difference_stderr[k])
            .fold(0.0, f64::max)
    }
}

pub fn kinetic_form_comparison(
    spec: &BasisSpec,
    hp: &HamiltonianParams,
    prop: &ProposalParams,
    plan: SamplingPlan,
    h: f64,
) -> Result<KineticComparison> {
    spec.validate()?;
    let n = spec.len();
    let m = n * n;
    let proposal = MolecularProposal::new(*prop)?;
    let est = integrate(&proposal, 3 * m, plan, |pt, out| {
        let mut samples = vec![Default::default(); n];
        spec.eval_all(pt.r1, pt.r2, &mut samples)?;
        let mut t = vec![0.0; n];
        for (j, idx) in spec.indices.iter().enumerate() {
            t[j] = local_energy_laplacian(*idx, pt.r1, pt.r2, &spec.params, hp, h)?;
        }
        for i in 0..n {
            for j in 0..n {
                let g = kinetic_integrand(&samples[i], &samples[j], hp);
                let l = samples[i].value * t[j];
                out[i * n + j] = g;
                out[m + i * n + j] = l;
                out[2 * m + i * n + j] = g - l;
            }
        }
        Ok(())
    })?;
    let mean = est.mean();
    let se = est.stderr();
    Ok(KineticComparison {
        n,
        gradient: mean[..m].to_vec(),
        laplacian: mean[m..2 * m].to_vec(),
        gradient_stderr: se[..m].to_vec(),
        laplacian_stderr: se[m..2 * m].to_vec(),
        difference_stderr: se[2 * m..].to_vec(),
    })
}

/// Largest relative error between analytic and central-difference
/// gradients of every basis function, over `n_points` proposal draws.
pub fn gradient_check(spec: &BasisSpec, n_points: usize, seed: u64, h: f64) -> Result<f64> {
    let prop = ProposalParams::for_basis(&spec.params);
    let mut rng = RngStream::new(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..n_points {
        let pt = sample_point(&mut rng, &prop)?;
        for idx in &spec.indices {
            let a = eval_basis(*idx, pt.r1, pt.r2, &spec.params)?;
            let f = |r1: Vec3, r2: Vec3| eval_basis(*idx, r1, r2, &spec.params).map(|s| s.value);
            let mut num = 0.0;
            let mut den = 0.0;
            for k in 0..3 {
                let d1 = (f(pt.r1.shifted(k, h), pt.r2)? - f(pt.r1.shifted(k, -h), pt.r2)?) / (2.0 * h);
                let d2 = (f(pt.r1, pt.r2.shifted(k, h))? - f(pt.r1, pt.r2.shifted(k, -h))?) / (2.0 * h);
                num += (d1 - a.grad1.get(k)).powi(2) + (d2 - a.grad2.get(k)).powi(2);
                den += a.grad1.get(k).powi(2) + a.grad2.get(k).powi(2);
            }
            if den > 0.0 {
                worst = worst.max((num / den).sqrt());
            }
        }
    }
    Ok(worst)
}

/// Random symmetric `H` and SPD `S` of size `n`.
pub(crate) fn random_pair(rng: &mut RngStream, n: usize) -> (SymMatrix, SymMatrix) {
    let h = SymMatrix::from_fn(n, |_, _| 2.0 * rng.uniform() - 1.0);
    let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| 2.0 * rng.uniform() - 1.0).collect()).collect();
    let s = SymMatrix::from_fn(n, |i, j| {
        let dot: f64 = (0..n).map(|k| b[k][i] * b[k][j]).sum();
        dot + if i == j { 0.1 } else { 0.0 }
    });
    (h, s)
}

fn eigensolver_check(pairs: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = RngStream::new(seed, 1000);
    let mut worst: f64 = 0.0;
    for k in 0..pairs {
        let n = 1 + k % 16;
        let (h, s) = random_pair(&mut rng, n);
        let sol = solve_generalized(&h, &s, DEFAULT_TOL)?;
        let bound = 1e-10 * h.frobenius_norm().max(1.0);
        for r in &sol.residual_norms {
            worst = worst.max(r / bound);
        }
    }
    Ok((worst <= 1.0, format!("{pairs} pairs, worst residual / bound = {worst:.3e}")))
}

fn grid_vs_mc(opts: &CheckOptions) -> Result<(bool, String)> {
    let spec = BasisSpec::four_function(BasisParams::default());
    let hp = HamiltonianParams::default();
    let prop = ProposalParams::for_basis(&spec.params);
    let (gh, gs) = grid_reference(&spec, &hp, opts.grid_nodes, opts.box_half_width)?;
    let mc = estimate_matrices(&spec, &hp, &prop, opts.grid_mc_samples, 20, opts.seed)?;
    let n = spec.len();
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let entries = [
                ("S", gs.get(i, j), mc.s.get(i, j), mc.s_stderr.get(i, j), 0.02),
                ("H", gh.get(i, j), mc.h.get(i, j), mc.h_stderr.get(i, j), 0.05),
            ];
            for (name, grid, mc, se, rel) in entries {
                let ratio = (grid - mc).abs() / (3.0 * se).max(rel * grid.abs());
                worst = worst.max(ratio);
                if ratio > 1.0 {
                    failed.push(format!("{name}{i}{j}: grid {grid:.5} vs {mc:.5} ± {se:.5}"));
                }
            }
        }
    }
    let detail = if failed.is_empty() {
        format!("{} entries, worst at {worst:.2} of tolerance", n * (n + 1))
    } else {
        format!("{} of {} entries outside tolerance: {}", failed.len(), n * (n + 1), failed.join("; "))
    };
    Ok((failed.is_empty(), detail))
}

/// Runs every check; never stops early.
pub fn run_checks(opts: &CheckOptions) -> Vec<CheckOutcome> {
    let spec = BasisSpec::four_function(BasisParams::default());
    let hp = HamiltonianParams::default();
    let prop = ProposalParams::for_basis(&spec.params);
    let mut out = Vec::new();

    out.push(CheckOutcome::from_result(
        "basis gradients vs central differences",
        gradient_check(&spec, opts.gradient_points, opts.seed, 1e-5)
            .map(|e| (e < 1e-6, format!("{} points, max relative error {e:.2e}", opts.gradient_points))),
    ));
    out.push(CheckOutcome::from_result("grid quadrature vs Monte Carlo", grid_vs_mc(opts)));
    out.push(CheckOutcome::from_result(
        "hydrogen single-Gaussian self-test",
        hydrogen_gaussian_selftest(OPTIMAL_ALPHA, opts.hydrogen_samples, 20, opts.seed).map(|r| {
            (
                r.z_score() <= 3.0,
                format!("E = {:.6} ± {:.6}, exact {:.6}", r.energy, r.stderr, r.exact),
            )
        }),
    ));
    out.push(CheckOutcome::from_result(
        "kinetic gradient form vs Laplacian form",
        SamplingPlan::new(opts.kinetic_samples, 20, opts.seed)
            .and_then(|plan| kinetic_form_comparison(&spec, &hp, &prop, plan, 1e-4))
            .map(|k| {
                let z = k.max_z();
                (z <= 3.0, format!("max deviation {z:.2} standard errors"))
            }),
    ));
    out.push(CheckOutcome::from_result("generalized eigensolver residuals", eigensolver_check(opts.eigen_pairs, opts.seed)));
    out
}
