//! Blocked Monte-Carlo integration with jackknife errors.
//!
//! Samples are split into `n_blocks` contiguous blocks; block `b` draws from
//! `RngStream::new(seed, b)`. Blocks may run on any number of threads, the
//! reduction always happens in block order with compensated sums, so the
//! result depends only on `(seed, config)`. Within a block, points are drawn
//! in pairs via [`Proposal::draw_pair`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::proposal::{MolecularProposal, Proposal, ProposalParams, SamplePoint};
use super::rng::RngStream;
use crate::basis::{BasisSpec, TwoParticleSample};
use crate::coords::Vec3;
use crate::eigensolver::SymMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::{kinetic_integrand, potential, HamiltonianParams};

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = CompensatedSum::default();
    values.into_iter().for_each(|v| s.add(v));
    s.value()
}

/// Leave-one-out jackknife: `(mean of replicas, standard error)`.
pub fn jackknife(replicas: &[f64]) -> (f64, f64) {
    let b = replicas.len() as f64;
    let mean = compensated_sum(replicas.iter().copied()) / b;
    let ss = compensated_sum(replicas.iter().map(|r| (r - mean) * (r - mean)));
    (mean, ((b - 1.0) / b * ss).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub n_samples: usize,
    pub n_blocks: usize,
    pub seed: u64,
}

impl SamplingPlan {
    /// Rounds `n_samples` up to a multiple of `n_blocks`.
    pub fn new(n_samples: usize, n_blocks: usize, seed: u64) -> Result<Self> {
        if n_blocks < 2 {
            return Err(Error::invalid(format!("need at least 2 blocks, got {n_blocks}")));
        }
        if n_samples < n_blocks {
            return Err(Error::invalid(format!("n_samples {n_samples} < n_blocks {n_blocks}")));
        }
        let per_block = n_samples.div_ceil(n_blocks);
        Ok(Self { n_samples: per_block * n_blocks, n_blocks, seed })
    }

    pub fn block_size(&self) -> usize {
        self.n_samples / self.n_blocks
    }
}

/// Per-block means of a vector of integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockedEstimate {
    pub plan: SamplingPlan,
    pub block_means: Vec<Vec<f64>>,
    /// Accepted proposal draws, summed over blocks.
    pub accepted: u64,
    pub rejected: u64,
}

impl BlockedEstimate {
    pub fn n_outputs(&self) -> usize {
        self.block_means.first().map_or(0, Vec::len)
    }

    pub fn mean(&self) -> Vec<f64> {
        let b = self.block_means.len() as f64;
        (0..self.n_outputs())
            .map(|k| compensated_sum(self.block_means.iter().map(|m| m[k])) / b)
            .collect()
    }

    /// Leave-one-block-out means.
    pub fn replicas(&self) -> Vec<Vec<f64>> {
        leave_one_out(&self.block_means)
    }

    pub fn stderr(&self) -> Vec<f64> {
        let reps = self.replicas();
        (0..self.n_outputs())
            .map(|k| jackknife(&reps.iter().map(|r| r[k]).collect::<Vec<_>>()).1)
            .collect()
    }
}

fn leave_one_out(blocks: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let b = blocks.len();
    let m = blocks.first().map_or(0, Vec::len);
    let totals: Vec<f64> = (0..m).map(|k| compensated_sum(blocks.iter().map(|x| x[k]))).collect();
    blocks
        .iter()
        .map(|own| (0..m).map(|k| (totals[k] - own[k]) / (b - 1) as f64).collect())
        .collect()
}

/// Estimates `∫ f_k` for every output `k` of `integrand`, which writes the
/// raw integrand values (not divided by the density) into its buffer.
pub fn integrate<P, F>(proposal: &P, n_outputs: usize, plan: SamplingPlan, integrand: F) -> Result<BlockedEstimate>
where
    P: Proposal,
    F: Fn(&SamplePoint, &mut [f64]) -> Result<()> + Sync,
{
    let block_size = plan.block_size();
    let blocks: Vec<Result<(Vec<f64>, u64, u64)>> = (0..plan.n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(plan.seed, b as u64);
            let mut sums = vec![CompensatedSum::default(); n_outputs];
            let mut buf = vec![0.0; n_outputs];
            let mut rejected = 0u64;
            let mut add = |pt: &SamplePoint, sums: &mut [CompensatedSum]| -> Result<()> {
                integrand(pt, &mut buf)?;
                let w = 1.0 / pt.density;
                for (s, v) in sums.iter_mut().zip(&buf) {
                    s.add(v * w);
                }
                Ok(())
            };
            for _ in 0..block_size / 2 {
                for pt in &proposal.draw_pair(&mut rng, &mut rejected)? {
                    add(pt, &mut sums)?;
                }
            }
            if block_size % 2 == 1 {
                add(&proposal.draw(&mut rng, &mut rejected)?, &mut sums)?;
            }
            let accepted = block_size as u64;
            let means = sums.iter().map(|s| s.value() / block_size as f64).collect();
            Ok((means, accepted, rejected))
        })
        .collect();

    let mut block_means = Vec::with_capacity(plan.n_blocks);
    let (mut accepted, mut rejected) = (0, 0);
    for r in blocks {
        let (m, a, rj) = r?;
        block_means.push(m);
        accepted += a;
        rejected += rj;
    }
    Ok(BlockedEstimate { plan, block_means, accepted, rejected })
}

/// Packed upper-triangle position of `(i, j)`, `i ≤ j`.
fn packed(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    i * n - i * (i + 1) / 2 + j
}

/// Evaluates the overlap and Hamiltonian integrands of every pair `i ≤ j` at
/// one point. Output layout: `[S packed..., H packed...]`.
pub struct MatrixIntegrand<'a> {
    pub spec: &'a BasisSpec,
    pub hamiltonian: &'a HamiltonianParams,
}

impl MatrixIntegrand<'_> {
    pub fn n_outputs(&self) -> usize {
        let n = self.spec.len();
        n * (n + 1)
    }

    pub fn eval(&self, r1: Vec3, r2: Vec3, samples: &mut [TwoParticleSample], out: &mut [f64]) -> Result<()> {
        out.fill(0.0);
        self.accumulate(r1, r2, 1.0, samples, out)
    }

    /// Mean of [`eval`](Self::eval) over the three cyclic permutations of the
    /// Cartesian axes. The permutations are rotations and the proposal is
    /// isotropic, so the estimate stays unbiased; for odd-`p` functions the
    /// factor `x̂²` is replaced by its angular mean `1/3`, which removes most
    /// of the sampling noise between the two parity blocks.
    pub fn eval_symmetrized(
        &self,
        r1: Vec3,
        r2: Vec3,
        samples: &mut [TwoParticleSample],
        out: &mut [f64],
    ) -> Result<()> {
        out.fill(0.0);
        let cycle = |v: Vec3| Vec3::new(v.y, v.z, v.x);
        let (mut a, mut b) = (r1, r2);
        for _ in 0..3 {
            self.accumulate(a, b, 1.0 / 3.0, samples, out)?;
            (a, b) = (cycle(a), cycle(b));
        }
        Ok(())
    }

    fn accumulate(
        &self,
        r1: Vec3,
        r2: Vec3,
        weight: f64,
        samples: &mut [TwoParticleSample],
        out: &mut [f64],
    ) -> Result<()> {
        let n = self.spec.len();
        let half = n * (n + 1) / 2;
        self.spec.eval_all(r1, r2, samples)?;
        let v = potential(r1, r2)?;
        for i in 0..n {
            for j in i..n {
                let (a, b) = (&samples[i], &samples[j]);
                let k = packed(n, i, j);
                let ov = a.value * b.value;
                out[k] += weight * ov;
                out[half + k] += weight * (kinetic_integrand(a, b, self.hamiltonian) + ov * v);
            }
        }
        Ok(())
    }

    /// Unpacks `[S packed..., H packed...]` into `(H, S)`.
    pub fn unpack(&self, values: &[f64]) -> (SymMatrix, SymMatrix) {
        let n = self.spec.len();
        let half = n * (n + 1) / 2;
        let s = SymMatrix::from_fn(n, |i, j| values[packed(n, i, j)]);
        let h = SymMatrix::from_fn(n, |i, j| values[half + packed(n, i, j)]);
        (h, s)
    }
}

/// One block's mean matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrices {
    pub h: SymMatrix,
    pub s: SymMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEstimate {
    pub n: usize,
    pub h: SymMatrix,
    pub s: SymMatrix,
    pub h_stderr: SymMatrix,
    pub s_stderr: SymMatrix,
    pub n_samples: usize,
    pub n_blocks: usize,
    pub seed: u64,
    /// Accepted proposal draws; equals `n_samples`.
    pub accepted_draws: u64,
    pub rejected_draws: u64,
    pub blocks: Vec<BlockMatrices>,
}

impl MatrixEstimate {
    /// Assembles means and jackknife errors from per-block matrices.
    pub fn from_blocks(blocks: Vec<BlockMatrices>, plan: SamplingPlan, accepted: u64, rejected: u64) -> Self {
        let n = blocks[0].h.n();
        let nb = blocks.len() as f64;
        let mean = |pick: &dyn Fn(&BlockMatrices) -> &SymMatrix| {
            SymMatrix::from_fn(n, |i, j| compensated_sum(blocks.iter().map(|b| pick(b).get(i, j))) / nb)
        };
        let h = mean(&|b| &b.h);
        let s = mean(&|b| &b.s);
        let mut est = Self {
            n,
            h,
            s,
            h_stderr: SymMatrix::zeros(n),
            s_stderr: SymMatrix::zeros(n),
            n_samples: plan.n_samples,
            n_blocks: plan.n_blocks,
            seed: plan.seed,
            accepted_draws: accepted,
            rejected_draws: rejected,
            blocks,
        };
        let reps: Vec<(SymMatrix, SymMatrix)> = (0..est.blocks.len()).map(|b| est.replica(b)).collect();
        est.h_stderr = entrywise_stderr(n, reps.iter().map(|r| &r.0));
        est.s_stderr = entrywise_stderr(n, reps.iter().map(|r| &r.1));
        est
    }

    pub fn plan(&self) -> SamplingPlan {
        SamplingPlan { n_samples: self.n_samples, n_blocks: self.n_blocks, seed: self.seed }
    }

    /// `(H, S)` with block `b` left out.
    pub fn replica(&self, b: usize) -> (SymMatrix, SymMatrix) {
        let nb = self.blocks.len();
        let n = self.n;
        let loo = |pick: &dyn Fn(&BlockMatrices) -> &SymMatrix| {
            SymMatrix::from_fn(n, |i, j| {
                let total = compensated_sum(self.blocks.iter().map(|x| pick(x).get(i, j)));
                (total - pick(&self.blocks[b]).get(i, j)) / (nb - 1) as f64
            })
        };
        (loo(&|x| &x.h), loo(&|x| &x.s))
    }

    pub fn replicas(&self) -> Vec<(SymMatrix, SymMatrix)> {
        (0..self.blocks.len()).map(|b| self.replica(b)).collect()
    }
}

pub(crate) fn entrywise_stderr<'a>(n: usize, reps: impl Iterator<Item = &'a SymMatrix> + Clone) -> SymMatrix {
    SymMatrix::from_fn(n, |i, j| jackknife(&reps.clone().map(|m| m.get(i, j)).collect::<Vec<_>>()).1)
}

/// Monte-Carlo estimate of every `H_ij` and `S_ij` from one shared sample,
/// using [`MatrixIntegrand::eval_symmetrized`].
pub fn estimate_matrices(
    spec: &BasisSpec,
    hp: &HamiltonianParams,
    prop: &ProposalParams,
    n_samples: usize,
    n_blocks: usize,
    seed: u64,
) -> Result<MatrixEstimate> {
    spec.validate()?;
    hp.validate()?;
    let plan = SamplingPlan::new(n_samples, n_blocks, seed)?;
    let proposal = MolecularProposal::new(*prop)?;
    let integrand = MatrixIntegrand { spec, hamiltonian: hp };
    let raw = integrate(&proposal, integrand.n_outputs(), plan, |pt, out| {
        let mut samples = [TwoParticleSample::default(); 8];
        let n = spec.len();
        if n <= samples.len() {
            integrand.eval_symmetrized(pt.r1, pt.r2, &mut samples[..n], out)
        } else {
            let mut samples = vec![TwoParticleSample::default(); n];
            integrand.eval_symmetrized(pt.r1, pt.r2, &mut samples, out)
        }
    })?;
    let blocks = raw
        .block_means
        .iter()
        .map(|m| {
            let (h, s) = integrand.unpack(m);
            BlockMatrices { h, s }
        })
        .collect();
    Ok(MatrixEstimate::from_blocks(blocks, plan, raw.accepted, raw.rejected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisIndex, BasisParams};
    use crate::quadrature::proposal::AtomicProposal;
    use statrs::function::erf::erfc;

    fn small_spec() -> BasisSpec {
        BasisSpec::new(BasisParams::default(), vec![BasisIndex::new(0, 0)]).unwrap()
    }

    #[test]
    fn plan_rounds_up() {
        let p = SamplingPlan::new(1001, 20, 0).unwrap();
        assert_eq!(p.n_samples, 1020);
        assert_eq!(p.block_size(), 51);
        assert!(SamplingPlan::new(10, 1, 0).is_err());
        assert!(SamplingPlan::new(3, 4, 0).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut v = vec![1e16, 1.0, -1e16];
        v.extend(std::iter::repeat_n(1.0, 10));
        assert_eq!(compensated_sum(v), 11.0);
    }

    #[test]
    fn density_ratio_integrates_to_one_exactly() {
        let prop = MolecularProposal::new(ProposalParams::for_basis(&BasisParams::default())).unwrap();
        let plan = SamplingPlan::new(10_000, 10, 3).unwrap();
        let est = integrate(&prop, 1, plan, |pt, out| {
            out[0] = pt.density;
            Ok(())
        })
        .unwrap();
        // g/g is 1 up to one rounding of the division
        assert!((est.mean()[0] - 1.0).abs() < 1e-15);
        assert!(est.stderr()[0] < 1e-15);
    }

    #[test]
    fn constant_integrand_has_zero_error() {
        let prop = AtomicProposal::new(1.0).unwrap();
        let plan = SamplingPlan::new(4000, 8, 1).unwrap();
        let est = integrate(&prop, 1, plan, |pt, out| {
            // integrand proportional to the density: the ratio is exactly 2
            out[0] = 2.0 * pt.density;
            Ok(())
        })
        .unwrap();
        let r = est.replicas();
        assert!(r.iter().all(|x| x[0] == r[0][0]));
        assert_eq!(est.stderr()[0], 0.0);
    }

    #[test]
    fn shell_gaussian_closed_form_within_three_sigma() {
        // ∫ exp(−a|r1 − r2|²) exp(−b(|r2| − r0)²) d³r1 d³r2
        let (a, b, r0) = (0.9f64, 30.0f64, 1.0f64);
        let pi = std::f64::consts::PI;
        let e = (-b * r0 * r0).exp();
        let g = 0.5 * (pi / b).sqrt() * erfc(-r0 * b.sqrt());
        let radial = (-r0 * e / (2.0 * b) + g / (2.0 * b)) + 2.0 * r0 * e / (2.0 * b) + r0 * r0 * g;
        let exact = (pi / a).powf(1.5) * 4.0 * pi * radial;

        let prop = MolecularProposal::new(ProposalParams::for_basis(&BasisParams::default())).unwrap();
        let plan = SamplingPlan::new(200_000, 20, 8).unwrap();
        let est = integrate(&prop, 1, plan, |pt, out| {
            out[0] = (-a * (pt.r1 - pt.r2).norm_sq()).exp() * (-b * (pt.r2.norm() - r0).powi(2)).exp();
            Ok(())
        })
        .unwrap();
        let (m, se) = (est.mean()[0], est.stderr()[0]);
        assert!((m - exact).abs() < 3.0 * se, "{m} ± {se} vs {exact}");
        assert!(se < 0.01 * exact);
    }

    #[test]
    fn one_function_basis_error_scales_as_inverse_sqrt_n() {
        let spec = small_spec();
        let hp = HamiltonianParams::default();
        let prop = ProposalParams::for_basis(&spec.params);
        let a = estimate_matrices(&spec, &hp, &prop, 50_000, 20, 5).unwrap();
        let b = estimate_matrices(&spec, &hp, &prop, 200_000, 20, 6).unwrap();
        assert_eq!(a.n, 1);
        assert!(a.s.get(0, 0) > 0.0);
        let ratio = (b.s_stderr.get(0, 0) / b.s.get(0, 0)) / (a.s_stderr.get(0, 0) / a.s.get(0, 0));
        assert!((0.4..0.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn draws_are_counted_exactly() {
        let spec = BasisSpec::four_function(BasisParams::default());
        let hp = HamiltonianParams::default();
        let est = estimate_matrices(&spec, &hp, &ProposalParams::for_basis(&spec.params), 10_001, 10, 2).unwrap();
        assert_eq!(est.n_samples, 10_010);
        assert_eq!(est.accepted_draws, 10_010);
        assert_eq!(est.blocks.len(), 10);
    }

    #[test]
    fn estimate_is_symmetric_with_positive_overlap_diagonal() {
        let spec = BasisSpec::four_function(BasisParams::default());
        let hp = HamiltonianParams::default();
        let est = estimate_matrices(&spec, &hp, &ProposalParams::for_basis(&spec.params), 20_000, 10, 4).unwrap();
        for i in 0..4 {
            assert!(est.s.get(i, i) > 0.0);
            for j in 0..4 {
                assert_eq!(est.h.get(i, j), est.h.get(j, i));
                assert!(est.h_stderr.get(i, j) >= 0.0 && est.s_stderr.get(i, j) >= 0.0);
            }
        }
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let spec = BasisSpec::four_function(BasisParams::default());
        let hp = HamiltonianParams::default();
        let prop = ProposalParams::for_basis(&spec.params);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_matrices(&spec, &hp, &prop, 20_000, 10, 42).unwrap())
        };
        let a = run(1);
        assert_eq!(a, run(3));
        assert_eq!(a, run(8));
    }
}
