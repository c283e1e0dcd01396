//! Correlated two-particle basis functions.
//!
//! ```text
//! φ_pq(r1, r2) = ψ_p(r2) · (φ_q(r1 − r2) + s·φ_q(r1 + r2))
//! ψ_p(r)       = f_p(r) · exp(−w_proton (|r| − r0)²)
//! φ_0(r)       = exp(−w_electron |r|²)
//! f_0 = 1,  f_1 = x/|r|,  f_2 = |r| − r0,  f_3 = f_2·f_1
//! ```
//!
//! `r1` is the electron, `r2` the proton half-separation (protons at ±r2).
//! Values are not normalized; normalization is applied to the estimated
//! matrices (see [`crate::driver::normalize_matrices`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coords::Vec3;
use crate::error::{Error, Result};

/// Highest supported proton-factor index.
pub const MAX_P: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisParams {
    /// Width of the proton radial shell, bohr⁻².
    pub w_proton: f64,
    /// Width of the electron Gaussians, bohr⁻².
    pub w_electron: f64,
    /// Shell radius: half the proton-proton distance, bohr.
    pub r0: f64,
    /// +1 bonding, −1 anti-bonding.
    pub s: i32,
}

impl Default for BasisParams {
    fn default() -> Self {
        Self { w_proton: 18.0, w_electron: 0.45, r0: 1.0, s: 1 }
    }
}

impl BasisParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("w_proton", self.w_proton), ("w_electron", self.w_electron), ("r0", self.r0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.s != 1 && self.s != -1 {
            return Err(Error::invalid(format!("s must be +1 or -1, got {}", self.s)));
        }
        Ok(())
    }

    fn sign(&self) -> f64 {
        f64::from(self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisIndex {
    pub p: u8,
    pub q: u8,
}

/// Mirror symmetry of a basis function under `(x1, x2) → (−x1, −x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl BasisIndex {
    pub const fn new(p: u8, q: u8) -> Self {
        Self { p, q }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p > MAX_P {
            return Err(Error::invalid(format!("proton factor p = {} not in 0..=3", self.p)));
        }
        if self.q != 0 {
            return Err(Error::invalid(format!("electron factor q = {} not supported (only 0)", self.q)));
        }
        Ok(())
    }

    pub fn parity(&self) -> Parity {
        if self.p.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `f_1` and `f_3` contain `x/|r|` and are undefined at the origin.
    pub fn is_singular_at_origin(&self) -> bool {
        self.parity() == Parity::Odd
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.p, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub params: BasisParams,
    pub indices: Vec<BasisIndex>,
}

impl BasisSpec {
    pub fn new(params: BasisParams, indices: Vec<BasisIndex>) -> Result<Self> {
        let spec = Self { params, indices };
        spec.validate()?;
        Ok(spec)
    }

    /// The four functions φ_00, φ_10, φ_20, φ_30.
    pub fn four_function(params: BasisParams) -> Self {
        Self { params, indices: default_indices() }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.indices.is_empty() {
            return Err(Error::invalid("basis index list is empty"));
        }
        for (k, idx) in self.indices.iter().enumerate() {
            idx.validate()?;
            if self.indices[..k].contains(idx) {
                return Err(Error::invalid(format!("duplicate basis index {idx}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn has_odd(&self) -> bool {
        self.indices.iter().any(BasisIndex::is_singular_at_origin)
    }

    /// Evaluates every basis function of the spec at one point.
    pub fn eval_all(&self, r1: Vec3, r2: Vec3, out: &mut [TwoParticleSample]) -> Result<()> {
        debug_assert_eq!(out.len(), self.indices.len());
        let electron = eval_electron_factor(0, r1, r2, &self.params)?;
        for (slot, idx) in out.iter_mut().zip(&self.indices) {
            let proton = eval_proton_factor(idx.p, r2, &self.params)?;
            *slot = combine(proton, electron);
        }
        Ok(())
    }
}

pub fn default_indices() -> Vec<BasisIndex> {
    (0..=MAX_P).map(|p| BasisIndex::new(p, 0)).collect()
}

/// Value of a basis function and its gradients with respect to `r1` and `r2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TwoParticleSample {
    pub value: f64,
    pub grad1: Vec3,
    pub grad2: Vec3,
}

/// `ψ_p(r)` and its gradient.
pub fn eval_proton_factor(p: u8, r: Vec3, params: &BasisParams) -> Result<(f64, Vec3)> {
    let rho = r.norm();
    let rhat = if rho > 0.0 { r / rho } else { Vec3::ZERO };
    let u = rho - params.r0;
    let shell = (-params.w_proton * u * u).exp();
    let d_shell = rhat * (-2.0 * params.w_proton * u * shell);

    let (f, df) = match p {
        0 => (1.0, Vec3::ZERO),
        2 => (u, rhat),
        1 | 3 => {
            if rho == 0.0 {
                return Err(Error::SingularPoint("x/|r| at the origin"));
            }
            let ang = r.x / rho;
            // ∇(x/ρ) = (e_x − (x/ρ) r̂)/ρ
            let d_ang = (Vec3::new(1.0, 0.0, 0.0) - rhat * ang) / rho;
            if p == 1 {
                (ang, d_ang)
            } else {
                (u * ang, rhat * ang + d_ang * u)
            }
        }
        _ => return Err(Error::invalid(format!("proton factor p = {p} not in 0..=3"))),
    };
    Ok((f * shell, df * shell + d_shell * f))
}

/// `φ_q(r1 − r2) + s·φ_q(r1 + r2)` and its gradients w.r.t. `r1` and `r2`.
pub fn eval_electron_factor(q: u8, r1: Vec3, r2: Vec3, params: &BasisParams) -> Result<(f64, Vec3, Vec3)> {
    if q != 0 {
        return Err(Error::invalid(format!("electron factor q = {q} not supported (only 0)")));
    }
    let w = params.w_electron;
    let s = params.sign();
    let a = r1 - r2;
    let b = r1 + r2;
    let ga = (-w * a.norm_sq()).exp();
    let gb = s * (-w * b.norm_sq()).exp();
    let grad1 = (a * ga + b * gb) * (-2.0 * w);
    let grad2 = (a * ga - b * gb) * (2.0 * w);
    Ok((ga + gb, grad1, grad2))
}

fn combine((p, dp): (f64, Vec3), (e, de1, de2): (f64, Vec3, Vec3)) -> TwoParticleSample {
    TwoParticleSample {
        value: p * e,
        grad1: de1 * p,
        grad2: dp * e + de2 * p,
    }
}

/// Unnormalized `φ_pq(r1, r2)` with gradients.
pub fn eval_basis(idx: BasisIndex, r1: Vec3, r2: Vec3, params: &BasisParams) -> Result<TwoParticleSample> {
    idx.validate()?;
    let proton = eval_proton_factor(idx.p, r2, params)?;
    let electron = eval_electron_factor(idx.q, r1, r2, params)?;
    Ok(combine(proton, electron))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    const H: f64 = 1e-5;

    fn params() -> BasisParams {
        BasisParams::default()
    }

    fn central_grad(f: impl Fn(Vec3) -> f64, at: Vec3) -> Vec3 {
        let mut g = [0.0; 3];
        for (k, slot) in g.iter_mut().enumerate() {
            *slot = (f(at.shifted(k, H)) - f(at.shifted(k, -H))) / (2.0 * H);
        }
        Vec3::from_array(g)
    }

    fn rel_err(a: Vec3, b: Vec3) -> f64 {
        (a - b).norm() / a.norm().max(f64::MIN_POSITIVE)
    }

    fn random_point(rng: &mut ChaCha8Rng) -> (Vec3, Vec3) {
        let mut n = || rng.sample::<f64, _>(StandardNormal);
        let dir = Vec3::new(n(), n(), n());
        let rho = (1.0 + 0.3 * n()).abs().max(1e-2);
        let r2 = dir / dir.norm() * rho;
        let site = if n() > 0.0 { r2 } else { -r2 };
        let r1 = site + Vec3::new(n(), n(), n()) * 0.9;
        (r1, r2)
    }

    #[test]
    fn proton_ground_factor_peaks_on_shell() {
        let (v, g) = eval_proton_factor(0, Vec3::new(0.0, 0.6, 0.8), &params()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(g.norm() < 1e-14);
    }

    #[test]
    fn vibrational_factor_vanishes_on_shell() {
        let (v, _) = eval_proton_factor(2, Vec3::new(0.0, 0.0, 1.0), &params()).unwrap();
        assert_eq!(v, 0.0);
        let (v, _) = eval_proton_factor(3, Vec3::new(0.6, 0.0, 0.8), &params()).unwrap();
        assert!(v.abs() < 1e-16);
    }

    #[test]
    fn rotational_factor_on_axis() {
        let p = params();
        let at = Vec3::new(p.r0, 0.0, 0.0);
        let (v, g) = eval_proton_factor(1, at, &p).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let fd = central_grad(|r| eval_proton_factor(1, r, &p).unwrap().0, at);
        // the exact gradient vanishes here; compare absolutely against the O(1) value
        assert!((g - fd).norm() < 1e-8, "{g:?} vs {fd:?}");
        let off = Vec3::new(0.7, 0.4, -0.5);
        let (_, g) = eval_proton_factor(1, off, &p).unwrap();
        let fd = central_grad(|r| eval_proton_factor(1, r, &p).unwrap().0, off);
        assert!(rel_err(g, fd) < 1e-8);
    }

    #[test]
    fn odd_factors_are_singular_at_origin() {
        for p in [1, 3] {
            assert!(matches!(
                eval_proton_factor(p, Vec3::ZERO, &params()),
                Err(Error::SingularPoint(_))
            ));
        }
        assert!(eval_proton_factor(0, Vec3::ZERO, &params()).is_ok());
        assert!(eval_proton_factor(4, Vec3::new(1.0, 0.0, 0.0), &params()).is_err());
    }

    #[test]
    fn electron_factor_at_origin() {
        let p = params();
        let r2 = Vec3::new(0.3, -0.4, 0.9);
        let (v, g1, _) = eval_electron_factor(0, Vec3::ZERO, r2, &p).unwrap();
        assert!((v - 2.0 * (-p.w_electron * r2.norm_sq()).exp()).abs() < 1e-15);
        assert!(g1.norm() < 1e-16);
        let anti = BasisParams { s: -1, ..p };
        let (v, _, _) = eval_electron_factor(0, Vec3::ZERO, r2, &anti).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn electron_factor_reference_value() {
        let at = Vec3::new(0.0, 0.0, 1.0);
        let (v, _, _) = eval_electron_factor(0, at, at, &params()).unwrap();
        // 1 + e^{-1.8}
        assert!((v - 1.165_298_888_221_586_4).abs() < 1e-14);
        assert!(eval_electron_factor(1, at, at, &params()).is_err());
    }

    #[test]
    fn basis_is_product_of_factors() {
        let p = params();
        let (r1, r2) = (Vec3::new(0.1, 0.2, 0.3), Vec3::new(-0.4, 0.5, 0.6));
        for pp in 0..=3 {
            let s = eval_basis(BasisIndex::new(pp, 0), r1, r2, &p).unwrap();
            let (a, _) = eval_proton_factor(pp, r2, &p).unwrap();
            let (b, _, _) = eval_electron_factor(0, r1, r2, &p).unwrap();
            assert_eq!(s.value, a * b);
        }
    }

    #[test]
    fn rotational_function_is_odd_under_proton_mirror() {
        let p = params();
        // electron on the x = 0 plane so only the proton factor sees the mirror
        let r1 = Vec3::new(0.0, 0.1, -0.3);
        let r2 = Vec3::new(0.5, 0.4, 0.7);
        let mirrored = Vec3::new(-r2.x, r2.y, r2.z);
        let a = eval_basis(BasisIndex::new(1, 0), r1, r2, &p).unwrap().value;
        let b = eval_basis(BasisIndex::new(1, 0), r1, mirrored, &p).unwrap().value;
        assert!(a.abs() > 0.0);
        assert!((a + b).abs() < 1e-15 * a.abs());
    }

    #[test]
    fn eval_all_matches_single_evaluations() {
        let spec = BasisSpec::four_function(params());
        let (r1, r2) = (Vec3::new(0.3, -0.1, 0.2), Vec3::new(0.1, 0.9, -0.2));
        let mut out = vec![TwoParticleSample::default(); spec.len()];
        spec.eval_all(r1, r2, &mut out).unwrap();
        for (s, idx) in out.iter().zip(&spec.indices) {
            assert_eq!(*s, eval_basis(*idx, r1, r2, &spec.params).unwrap());
        }
    }

    #[test]
    fn spec_validation() {
        let p = params();
        assert!(BasisSpec::new(p, vec![]).is_err());
        assert!(BasisSpec::new(p, vec![BasisIndex::new(0, 0), BasisIndex::new(0, 0)]).is_err());
        assert!(BasisSpec::new(p, vec![BasisIndex::new(0, 1)]).is_err());
        assert!(BasisSpec::new(BasisParams { s: 0, ..p }, default_indices()).is_err());
        assert!(BasisSpec::new(BasisParams { r0: -1.0, ..p }, default_indices()).is_err());
        assert!(BasisSpec::new(p, default_indices()).is_ok());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in [1, -1] {
            let p = BasisParams { s, ..params() };
            for _ in 0..250 {
                let (r1, r2) = random_point(&mut rng);
                for pp in 0..=3 {
                    let idx = BasisIndex::new(pp, 0);
                    let a = eval_basis(idx, r1, r2, &p).unwrap();
                    let fd1 = central_grad(|x| eval_basis(idx, x, r2, &p).unwrap().value, r1);
                    let fd2 = central_grad(|x| eval_basis(idx, r1, x, &p).unwrap().value, r2);
                    assert!(rel_err(a.grad1, fd1) < 1e-7, "grad1 p={pp} {:?} {:?}", a.grad1, fd1);
                    assert!(rel_err(a.grad2, fd2) < 1e-7, "grad2 p={pp} {:?} {:?}", a.grad2, fd2);
                }
            }
        }
    }

    #[test]
    fn symmetry_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = params();
        let yz = |v: Vec3| Vec3::new(v.x, -v.y, -v.z);
        let mx = |v: Vec3| Vec3::new(-v.x, v.y, v.z);
        for _ in 0..200 {
            let (r1, r2) = random_point(&mut rng);
            let (e, _, _) = eval_electron_factor(0, r1, r2, &p).unwrap();
            let (e_flip, _, _) = eval_electron_factor(0, r1, -r2, &p).unwrap();
            assert!((e - e_flip).abs() <= 1e-15 * e.abs());
            for pp in 0..=3 {
                let idx = BasisIndex::new(pp, 0);
                let v = eval_basis(idx, r1, r2, &p).unwrap().value;
                let v_yz = eval_basis(idx, yz(r1), yz(r2), &p).unwrap().value;
                assert!((v - v_yz).abs() <= 1e-14 * v.abs().max(1e-300));
                let v_mx = eval_basis(idx, mx(r1), mx(r2), &p).unwrap().value;
                let expected = if idx.parity() == Parity::Odd { -v } else { v };
                assert!((v_mx - expected).abs() <= 1e-14 * v.abs().max(1e-300));
                let v_inv = eval_basis(idx, -r1, r2, &p).unwrap().value;
                assert!((v - v_inv).abs() <= 1e-14 * v.abs().max(1e-300));
            }
        }
    }
}
