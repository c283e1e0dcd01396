//! Atomic units, 3-vectors and the reduction of the three-body problem
//! (electron + two protons) to two relative coordinates.
//!
//! With the center of mass pinned at the origin the electron sits at `r1`,
//! the first proton at `r2`, and the second proton at
//! `-(m_a r1 + m_b r2) / m_c`. The solver uses the simplification
//! `r_c ≈ -r2`, which is exact for a massless electron; [`reduce_coordinates`]
//! reports how far off it is for a concrete configuration.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA proton/electron mass ratio.
pub const PROTON_ELECTRON_MASS_RATIO: f64 = 1_836.152_673_43;

/// eV per hartree.
pub const HARTREE_TO_EV: f64 = 27.211_386;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub proton_electron_mass_ratio: f64,
    pub hartree_to_ev: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            proton_electron_mass_ratio: PROTON_ELECTRON_MASS_RATIO,
            hartree_to_ev: HARTREE_TO_EV,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        if self.proton_electron_mass_ratio <= 1000.0 || !self.proton_electron_mass_ratio.is_finite() {
            return Err(Error::invalid(format!(
                "proton/electron mass ratio {} must exceed 1000",
                self.proton_electron_mass_ratio
            )));
        }
        if !(self.hartree_to_ev > 27.0 && self.hartree_to_ev < 27.5) {
            return Err(Error::invalid(format!(
                "hartree_to_ev {} outside (27.0, 27.5)",
                self.hartree_to_ev
            )));
        }
        Ok(())
    }

    pub fn to_ev(&self, hartree: f64) -> f64 {
        hartree * self.hartree_to_ev
    }
}

/// Cartesian vector in bohr.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Component `k` (0 = x, 1 = y, 2 = z).
    pub fn get(self, k: usize) -> f64 {
        match k {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("Vec3 component index {k} out of range"),
        }
    }

    /// Copy with component `k` shifted by `delta`.
    pub fn shifted(self, k: usize, delta: f64) -> Self {
        let mut a = self.to_array();
        a[k] += delta;
        Self::from_array(a)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, k: f64) -> Vec3 {
        Vec3::new(self.x / k, self.y / k, self.z / k)
    }
}

/// Positions, masses and charges of three point particles, atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBodyState {
    pub positions: [Vec3; 3],
    pub masses: [f64; 3],
    pub charges: [f64; 3],
}

impl ThreeBodyState {
    pub fn new(positions: [Vec3; 3], masses: [f64; 3], charges: [f64; 3]) -> Result<Self> {
        let state = Self { positions, masses, charges };
        state.validate()?;
        Ok(state)
    }

    /// Electron at `r_e`, protons at `r_p1` and `r_p2`.
    pub fn hydrogen_molecule_ion(r_e: Vec3, r_p1: Vec3, r_p2: Vec3, constants: &PhysicalConstants) -> Result<Self> {
        let mp = constants.proton_electron_mass_ratio;
        Self::new([r_e, r_p1, r_p2], [1.0, mp, mp], [-1.0, 1.0, 1.0])
    }

    /// Builds the state with its center of mass at the origin from the two
    /// relative coordinates: `r_a = r1`, `r_b = r2`, `r_c = -(m_a r1 + m_b r2)/m_c`.
    pub fn from_relative(r1: Vec3, r2: Vec3, masses: [f64; 3], charges: [f64; 3]) -> Result<Self> {
        if !(masses.iter().all(|m| *m > 0.0 && m.is_finite())) {
            return Err(Error::invalid("masses must be positive and finite"));
        }
        let rc = -(r1 * masses[0] + r2 * masses[1]) / masses[2];
        Self::new([r1, r2, rc], masses, charges)
    }

    fn validate(&self) -> Result<()> {
        if !self.positions.iter().all(|p| p.is_finite()) {
            return Err(Error::invalid("non-finite particle position"));
        }
        if !self.masses.iter().all(|m| *m > 0.0 && m.is_finite()) {
            return Err(Error::invalid("masses must be positive and finite"));
        }
        if !self.charges.iter().all(|q| q.is_finite()) {
            return Err(Error::invalid("non-finite charge"));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Copy of the state shifted so that its center of mass is the origin.
    pub fn translated_to_center_of_mass(&self) -> Result<Self> {
        let com = center_of_mass(self)?;
        let mut out = *self;
        for p in &mut out.positions {
            *p = *p - com;
        }
        Ok(out)
    }
}

pub fn center_of_mass(state: &ThreeBodyState) -> Result<Vec3> {
    state.validate()?;
    let weighted = state
        .positions
        .iter()
        .zip(state.masses)
        .fold(Vec3::ZERO, |acc, (p, m)| acc + *p * m);
    Ok(weighted / state.total_mass())
}

/// Two-particle coordinates of a state and the error of `r_c ≈ -r2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCoordinates {
    pub r1: Vec3,
    pub r2: Vec3,
    pub rc_exact: Vec3,
    pub rc_approx: Vec3,
    /// `|rc_exact - rc_approx|` in bohr.
    pub discrepancy: f64,
}

/// Translates the state to its center-of-mass frame and returns the relative
/// coordinates together with the exact and approximated third position.
pub fn reduce_coordinates(state: &ThreeBodyState) -> Result<ReducedCoordinates> {
    let frame = state.translated_to_center_of_mass()?;
    let [ma, mb, mc] = frame.masses;
    let r1 = frame.positions[0];
    let r2 = frame.positions[1];
    let rc_exact = -(r1 * ma + r2 * mb) / mc;
    let rc_approx = -r2;
    Ok(ReducedCoordinates {
        r1,
        r2,
        rc_exact,
        rc_approx,
        discrepancy: (rc_exact - rc_approx).norm(),
    })
}
