//! Monte-Carlo estimation of the Hamiltonian and overlap matrices, plus a
//! deterministic quadrature oracle.

mod estimate;
mod grid;
mod proposal;
mod rng;

pub use estimate::{
    compensated_sum, estimate_matrices, integrate, jackknife, BlockMatrices, BlockedEstimate, CompensatedSum,
    MatrixEstimate, MatrixIntegrand, SamplingPlan,
};
pub use grid::{
    gauss_legendre, grid_reference, grid_reference_with_budget, integrate_box, Rule, DEFAULT_GRID_BUDGET,
};
pub use proposal::{
    sample_point, AtomicProposal, MolecularProposal, Proposal, ProposalOverrides, ProposalParams, SamplePoint,
    TruncatedNormal, MAX_CONSECUTIVE_REJECTIONS,
};
pub use rng::RngStream;

pub(crate) use estimate::entrywise_stderr;
