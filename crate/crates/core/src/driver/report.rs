use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::basis::BasisIndex;
use crate::error::Result;
use crate::quadrature::MatrixEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Energy of state `state` above the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    pub state: usize,
    pub gap_au: f64,
    pub gap_ev: f64,
    pub stderr_au: f64,
    pub stderr_ev: f64,
}

/// Wall-clock seconds per stage; the only non-reproducible part of a report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub estimate_seconds: f64,
    pub solve_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub version: String,
    pub basis: Vec<BasisIndex>,
    /// Ascending.
    pub eigenvalues: Vec<Estimate>,
    /// `eigenvectors[k]` holds the coefficients of state `k` over `basis`,
    /// in the normalized basis.
    pub eigenvectors: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub excitations: Vec<Excitation>,
    pub hartree_to_ev: f64,
    /// Normalized matrix estimates, before parity blocking.
    pub matrices: MatrixEstimate,
    pub config: RunConfig,
    pub timing: Timing,
}

impl SpectrumReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn ground_energy(&self) -> Option<Estimate> {
        self.eigenvalues.first().copied()
    }

    /// Basis function with the largest coefficient in state `k`.
    pub fn dominant(&self, k: usize) -> BasisIndex {
        let c = &self.eigenvectors[k];
        let best = (0..c.len()).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap_or(0);
        self.basis[best]
    }

    /// Coefficients of state `k` rescaled to unit Euclidean length, the
    /// convention of published coefficient tables. The stored eigenvectors
    /// are normalized with respect to `S` instead.
    pub fn unit_coefficients(&self, k: usize) -> Vec<f64> {
        let c = &self.eigenvectors[k];
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.iter().map(|x| x / norm).collect()
    }

    /// Copy with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self { timing: Timing::default(), ..self.clone() }
    }

    /// Eigenvalue table with one column of unit-length coefficients per basis
    /// function, followed by the excitation energies.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>5}  {:>12}  {:>9}", "state", "eigenvalue", "stderr");
        for idx in &self.basis {
            let _ = write!(out, "  {:>9}", format!("c_{idx}"));
        }
        out.push('\n');
        for (k, e) in self.eigenvalues.iter().enumerate() {
            let _ = write!(out, "{k:>5}  {:>12.6}  {:>9.6}", e.value, e.stderr);
            for v in self.unit_coefficients(k) {
                let _ = write!(out, "  {v:>9.5}");
            }
            out.push('\n');
        }
        if !self.excitations.is_empty() {
            out.push('\n');
            let _ = writeln!(out, "{:>5}  {:>12}  {:>9}  {:>9}  {:>9}", "state", "gap (au)", "stderr", "gap (eV)", "stderr");
            for x in &self.excitations {
                let _ = writeln!(
                    out,
                    "{:>5}  {:>12.6}  {:>9.6}  {:>9.5}  {:>9.5}",
                    x.state, x.gap_au, x.stderr_au, x.gap_ev, x.stderr_ev
                );
            }
        }
        out
    }
}
