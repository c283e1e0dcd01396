//! Variational spectrum of the hydrogen molecule ion without the
//! Born-Oppenheimer approximation.
//!
//! The three-body problem is reduced to two particles: the electron at `r1`
//! and the proton half-separation `r2` (protons at `±r2`). A small correlated
//! basis `ψ_p(r2)·(φ(r1 − r2) + s·φ(r1 + r2))` is used, the Hamiltonian and
//! overlap matrix elements are estimated by importance-sampled Monte Carlo, and
//! the generalized eigenproblem `H c = e S c` yields the ground state together
//! with the first rotational and vibrational excitations.
//!
//! Module map:
//!
//! - [`coords`]: constants, vectors and the three-body coordinate reduction
//! - [`basis`]: basis functions with analytic gradients
//! - [`hamiltonian`]: Coulomb potential and matrix-element integrands
//! - [`quadrature`]: seeded Monte-Carlo estimation and a deterministic grid oracle
//! - [`eigensolver`]: dense generalized symmetric eigensolver
//! - [`driver`]: end-to-end pipeline, reports, parameter search and self-checks

pub mod basis;
pub mod coords;
pub mod driver;
pub mod eigensolver;
mod error;
pub mod hamiltonian;
pub mod quadrature;

pub use basis::{BasisIndex, BasisParams, BasisSpec, TwoParticleSample};
pub use coords::{PhysicalConstants, ThreeBodyState, Vec3};
pub use driver::{assemble_and_solve, RunConfig, SpectrumReport};
pub use eigensolver::{solve_generalized, EigenSolution, SymMatrix};
pub use error::{Error, Result};
pub use hamiltonian::HamiltonianParams;
pub use quadrature::{estimate_matrices, grid_reference, MatrixEstimate, ProposalParams};
