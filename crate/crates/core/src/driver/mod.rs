//! End-to-end pipeline: estimate → normalize → parity-block → solve, with
//! jackknife error bars on every eigenvalue and excitation energy.

mod checks;
mod config;
mod optimize;
mod report;
mod selftest;

use std::time::Instant;

pub use checks::{gradient_check, kinetic_form_comparison, run_checks, CheckOptions, CheckOutcome, KineticComparison};
pub use config::RunConfig;
pub use optimize::{optimize_parameters, Evaluation, OptimizationResult, ParamPoint, SearchStrategy};
pub use report::{Estimate, Excitation, SpectrumReport, Timing};
pub use selftest::{
    closed_form_energy, hydrogen_gaussian_selftest, hydrogen_gaussian_selftest_with, SelfTestResult, OPTIMAL_ALPHA,
};

use crate::basis::{BasisIndex, Parity};
use crate::coords::PhysicalConstants;
use crate::eigensolver::{sort_eigenpairs, solve_generalized, EigenSolution, SymMatrix, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{entrywise_stderr, estimate_matrices, jackknife, BlockMatrices, MatrixEstimate};

/// Rescales `(H, S)` by `D = diag(1/√S_ii)` so that `S_ii = 1`.
pub fn normalize_pair(h: &SymMatrix, s: &SymMatrix) -> Result<(SymMatrix, SymMatrix)> {
    let d = scaling(s)?;
    Ok(apply_scaling(h, s, &d))
}

fn scaling(s: &SymMatrix) -> Result<Vec<f64>> {
    s.diagonal()
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            if v > 0.0 && v.is_finite() {
                Ok(1.0 / v.sqrt())
            } else {
                Err(Error::NonPositiveDiagonal { index, value: v })
            }
        })
        .collect()
}

fn apply_scaling(h: &SymMatrix, s: &SymMatrix, d: &[f64]) -> (SymMatrix, SymMatrix) {
    let n = h.n();
    let h = SymMatrix::from_fn(n, |i, j| h.get(i, j) * d[i] * d[j]);
    let s = SymMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { s.get(i, j) * d[i] * d[j] });
    (h, s)
}

/// Applies the basis normalization constants at the matrix level.
///
/// Block means are rescaled with the same `D`; standard errors come from
/// leave-one-block-out replicas, each normalized by its own diagonal.
pub fn normalize_matrices(est: &MatrixEstimate) -> Result<MatrixEstimate> {
    let d = scaling(&est.s)?;
    let (h, s) = apply_scaling(&est.h, &est.s, &d);
    let n = est.n;
    let blocks = est
        .blocks
        .iter()
        .map(|b| BlockMatrices {
            h: SymMatrix::from_fn(n, |i, j| b.h.get(i, j) * d[i] * d[j]),
            s: SymMatrix::from_fn(n, |i, j| b.s.get(i, j) * d[i] * d[j]),
        })
        .collect();
    let mut out = MatrixEstimate { h, s, blocks, ..est.clone() };
    let reps = out
        .replicas()
        .iter()
        .map(|(h, s)| normalize_pair(h, s))
        .collect::<Result<Vec<_>>>()?;
    out.h_stderr = entrywise_stderr(n, reps.iter().map(|r| &r.0));
    out.s_stderr = entrywise_stderr(n, reps.iter().map(|r| &r.1));
    Ok(out)
}

/// Splits basis positions into the even (p = 0, 2) and odd (p = 1, 3)
/// mirror-parity groups, dropping empty groups.
pub fn parity_block(indices: &[BasisIndex]) -> Vec<Vec<usize>> {
    [Parity::Even, Parity::Odd]
        .into_iter()
        .map(|par| (0..indices.len()).filter(|&k| indices[k].parity() == par).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect()
}

/// Zeroes every entry that couples two different groups.
pub fn apply_blocking(m: &SymMatrix, groups: &[Vec<usize>]) -> SymMatrix {
    let n = m.n();
    let mut group_of = vec![0; n];
    for (g, members) in groups.iter().enumerate() {
        for &k in members {
            group_of[k] = g;
        }
    }
    SymMatrix::from_fn(n, |i, j| if group_of[i] == group_of[j] { m.get(i, j) } else { 0.0 })
}

/// Solves each group separately and merges the spectra in ascending order.
/// Eigenvectors are embedded back into the full basis with exact zeros
/// outside their group.
pub fn solve_blocked(h: &SymMatrix, s: &SymMatrix, groups: &[Vec<usize>]) -> Result<EigenSolution> {
    let n = h.n();
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for g in groups {
        let sol = solve_generalized(&h.submatrix(g), &s.submatrix(g), DEFAULT_TOL)?;
        for (e, c) in sol.eigenvalues.into_iter().zip(sol.eigenvectors) {
            let mut full = vec![0.0; n];
            for (k, &pos) in g.iter().enumerate() {
                full[pos] = c[k];
            }
            values.push(e);
            vectors.push(full);
        }
    }
    sort_eigenpairs(&mut values, &mut vectors);
    let (hb, sb) = (apply_blocking(h, groups), apply_blocking(s, groups));
    let residual_norms = values
        .iter()
        .zip(&vectors)
        .map(|(e, c)| {
            let (hc, sc) = (hb.mul_vec(c), sb.mul_vec(c));
            hc.iter().zip(&sc).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    Ok(EigenSolution { eigenvalues: values, eigenvectors: vectors, residual_norms })
}

/// Gaps `e_k − e_0` for `k ≥ 1`, without error bars.
pub fn excitations(eigenvalues: &[f64], constants: &PhysicalConstants) -> Result<Vec<Excitation>> {
    if eigenvalues.len() < 2 {
        return Err(Error::invalid("excitations need at least two eigenvalues"));
    }
    let e0 = eigenvalues[0];
    Ok(eigenvalues[1..]
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let gap = e - e0;
            Excitation {
                state: k + 1,
                gap_au: gap,
                gap_ev: constants.to_ev(gap),
                stderr_au: 0.0,
                stderr_ev: 0.0,
            }
        })
        .collect())
}

/// Runs the full pipeline for one configuration.
pub fn assemble_and_solve(config: &RunConfig) -> Result<SpectrumReport> {
    config.validate()?;
    let total = Instant::now();
    let spec = config.basis_spec()?;
    let hp = config.hamiltonian();
    let prop = config.proposal_params();

    let t = Instant::now();
    let raw = estimate_matrices(&spec, &hp, &prop, config.n_samples, config.n_blocks, config.seed)?;
    let estimate_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let est = normalize_matrices(&raw)?;
    let groups = if config.parity_blocking {
        parity_block(&spec.indices)
    } else {
        vec![(0..spec.len()).collect()]
    };
    let sol = solve_blocked(&est.h, &est.s, &groups)?;

    let replica_values = est
        .replicas()
        .iter()
        .map(|(h, s)| solve_blocked(h, s, &groups).map(|r| r.eigenvalues))
        .collect::<Result<Vec<_>>>()
        ?;
    let n = spec.len();
    let column = |f: &dyn Fn(&[f64]) -> f64| replica_values.iter().map(|v| f(v)).collect::<Vec<_>>();
    let eigenvalues = (0..n)
        .map(|k| Estimate { value: sol.eigenvalues[k], stderr: jackknife(&column(&|v| v[k])).1 })
        .collect::<Vec<_>>();

    let constants = PhysicalConstants::default();
    let excitations = if n >= 2 {
        let mut gaps = excitations(&sol.eigenvalues, &constants)?;
        for g in &mut gaps {
            let k = g.state;
            g.stderr_au = jackknife(&column(&|v| v[k] - v[0])).1;
            g.stderr_ev = constants.to_ev(g.stderr_au);
        }
        gaps
    } else {
        Vec::new()
    };
    let solve_seconds = t.elapsed().as_secs_f64();

    Ok(SpectrumReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        basis: spec.indices.clone(),
        eigenvalues,
        eigenvectors: sol.eigenvectors,
        residual_norms: sol.residual_norms,
        excitations,
        hartree_to_ev: constants.hartree_to_ev,
        matrices: est,
        config: config.clone(),
        timing: Timing { estimate_seconds, solve_seconds, total_seconds: total.elapsed().as_secs_f64() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::default_indices;
    use crate::quadrature::SamplingPlan;

    fn toy_estimate() -> MatrixEstimate {
        let h = |k: f64| SymMatrix::from_rows(vec![vec![-2.0 + k, 0.3], vec![0.3, -0.5 - k]]).unwrap();
        let s = |k: f64| SymMatrix::from_rows(vec![vec![4.0 + k, 0.5], vec![0.5, 0.25 + 0.1 * k]]).unwrap();
        let blocks = (0..4)
            .map(|b| {
                let k = 0.01 * (b as f64 - 1.5);
                BlockMatrices { h: h(k), s: s(k) }
            })
            .collect();
        MatrixEstimate::from_blocks(blocks, SamplingPlan::new(400, 4, 1).unwrap(), 400, 0)
    }

    #[test]
    fn normalization_sets_unit_diagonal_and_is_idempotent() {
        let est = toy_estimate();
        let a = normalize_matrices(&est).unwrap();
        assert_eq!(a.s.diagonal(), vec![1.0, 1.0]);
        assert_eq!(a.s_stderr.get(0, 0), 0.0);
        let b = normalize_matrices(&a).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normalization_preserves_eigenvalues() {
        let est = toy_estimate();
        let a = normalize_matrices(&est).unwrap();
        let e1 = solve_generalized(&est.h, &est.s, DEFAULT_TOL).unwrap().eigenvalues;
        let e2 = solve_generalized(&a.h, &a.s, DEFAULT_TOL).unwrap().eigenvalues;
        for (x, y) in e1.iter().zip(&e2) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn normalization_rejects_bad_diagonal() {
        let mut est = toy_estimate();
        est.s.set(1, 1, -0.1);
        assert!(matches!(normalize_matrices(&est), Err(Error::NonPositiveDiagonal { index: 1, .. })));
    }

    #[test]
    fn parity_groups() {
        assert_eq!(parity_block(&default_indices()), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(parity_block(&[BasisIndex::new(1, 0)]), vec![vec![0]]);
        assert_eq!(parity_block(&[BasisIndex::new(3, 0), BasisIndex::new(0, 0)]), vec![vec![1], vec![0]]);
    }

    #[test]
    fn blocked_solve_has_exact_zeros() {
        let h = SymMatrix::from_rows(vec![
            vec![-1.0, 1e-3, 0.1, 2e-3],
            vec![1e-3, -0.9, 1e-3, 0.05],
            vec![0.1, 1e-3, -0.7, 1e-3],
            vec![2e-3, 0.05, 1e-3, -0.6],
        ])
        .unwrap();
        let s = SymMatrix::identity(4);
        let groups = parity_block(&default_indices());
        let sol = solve_blocked(&h, &s, &groups).unwrap();
        assert!(sol.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for c in &sol.eigenvectors {
            let even = c[0] != 0.0 || c[2] != 0.0;
            let odd = c[1] != 0.0 || c[3] != 0.0;
            assert!(even ^ odd);
        }
        assert!(sol.residual_norms.iter().all(|r| *r < 1e-14));
    }

    #[test]
    fn table_one_gaps() {
        let table = [-0.521112, -0.520852, -0.505818, -0.505597];
        let gaps = excitations(&table, &PhysicalConstants::default()).unwrap();
        assert!((gaps[0].gap_au - 0.000260).abs() < 1e-12);
        assert!((gaps[1].gap_au - 0.015294).abs() < 1e-12);
        assert!(excitations(&table[..1], &PhysicalConstants::default()).is_err());
    }

    #[test]
    fn electron_volt_conversion() {
        let g = excitations(&[0.0, 0.0153], &PhysicalConstants::default()).unwrap();
        assert!((g[0].gap_ev - 0.41).abs() < 0.01);
        assert!((g[0].gap_ev - 0.0153 * 27.211386).abs() < 1e-15);
    }
}
