use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::{default_indices, BasisIndex, BasisParams, BasisSpec};
use crate::coords::PROTON_ELECTRON_MASS_RATIO;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianParams;
use crate::quadrature::{ProposalOverrides, ProposalParams, SamplingPlan};

/// Everything one pipeline run depends on. Missing JSON fields take their
/// defaults; unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub basis: BasisParams,
    pub indices: Vec<BasisIndex>,
    /// Proton mass in electron masses.
    pub proton_mass: f64,
    pub proposal: ProposalOverrides,
    pub n_samples: usize,
    pub n_blocks: usize,
    pub seed: u64,
    pub parity_blocking: bool,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            basis: BasisParams::default(),
            indices: default_indices(),
            proton_mass: PROTON_ELECTRON_MASS_RATIO,
            proposal: ProposalOverrides::default(),
            n_samples: 4_000_000,
            n_blocks: 20,
            seed: 1,
            parity_blocking: true,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn basis_spec(&self) -> Result<BasisSpec> {
        BasisSpec::new(self.basis, self.indices.clone())
    }

    pub fn hamiltonian(&self) -> HamiltonianParams {
        HamiltonianParams { m_p: self.proton_mass }
    }

    pub fn proposal_params(&self) -> ProposalParams {
        self.proposal.apply(ProposalParams::for_basis(&self.basis))
    }

    pub fn validate(&self) -> Result<()> {
        self.basis_spec()?;
        self.hamiltonian().validate()?;
        self.proposal_params().validate()?;
        SamplingPlan::new(self.n_samples, self.n_blocks, self.seed)?;
        Ok(())
    }
}
