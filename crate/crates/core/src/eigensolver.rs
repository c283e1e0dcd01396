//! Dense generalized symmetric eigenproblem `H c = e S c` for small `n`.
//!
//! `S = L Lᵀ` (Cholesky), `A = L⁻¹ H L⁻ᵀ` is diagonalized by cyclic Jacobi
//! rotations and eigenvectors are mapped back with `c = L⁻ᵀ y`, which makes
//! them S-orthonormal. Output order is ascending; the largest-magnitude
//! component of each eigenvector is made positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 50;

/// Default convergence threshold on `off(A) / ‖A‖_F`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Relative gap below which two eigenvalues count as degenerate for ordering.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Dense symmetric matrix, row-major. Symmetry is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Rejects non-square or not exactly symmetric input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix is not square"));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Principal submatrix on the given rows/columns, in that order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| f(*v)).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.rows()
    }
}

/// Lower-triangular Cholesky factor, row-major with zeros above the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
}

impl CholeskyFactor {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.l.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Solves `L x = b` in place.
    fn solve_lower(&self, b: &mut [f64]) {
        for i in 0..self.n {
            let s: f64 = (0..i).map(|k| self.get(i, k) * b[k]).sum();
            b[i] = (b[i] - s) / self.get(i, i);
        }
    }

    /// Solves `Lᵀ x = b` in place.
    fn solve_upper_t(&self, b: &mut [f64]) {
        for i in (0..self.n).rev() {
            let s: f64 = (i + 1..self.n).map(|k| self.get(k, i) * b[k]).sum();
            b[i] = (b[i] - s) / self.get(i, i);
        }
    }
}

pub fn cholesky(s: &SymMatrix) -> Result<CholeskyFactor> {
    let n = s.n();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let d = s.get(j, j) - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let v = s.get(i, j) - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            l[i * n + j] = v / djj;
        }
    }
    Ok(CholeskyFactor { n, l })
}

/// Eigenvalues (unsorted) and eigenvectors (as columns, `vecs[k]`) of a
/// symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(m: &SymMatrix, tol: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = m.n();
    let mut a = m.rows();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let norm = m.frobenius_norm();

    let off = |a: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > tol * norm {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    let vectors = (0..n).map(|k| (0..n).map(|i| v[i][k]).collect()).collect();
    Ok((values, vectors))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` holds the coefficients of eigenvalue `k`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖H c_k − e_k S c_k‖₂`.
    pub residual_norms: Vec<f64>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Flips the sign so that the largest-magnitude component is positive.
pub fn fix_sign(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    if v[argmax_abs(v)] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Sorts eigenpairs ascending; runs of degenerate eigenvalues are ordered
/// by the index of their largest-magnitude component.
pub fn sort_eigenpairs(values: &mut Vec<f64>, vectors: &mut Vec<Vec<f64>>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() {
            let (x, y) = (values[order[end - 1]], values[order[end]]);
            if (y - x).abs() > DEGENERACY_TOL * x.abs().max(y.abs()).max(1.0) {
                break;
            }
            end += 1;
        }
        order[start..end].sort_by_key(|&k| argmax_abs(&vectors[k]));
        start = end;
    }
    *values = order.iter().map(|&k| values[k]).collect();
    *vectors = order.iter().map(|&k| vectors[k].clone()).collect();
}

pub fn solve_generalized(h: &SymMatrix, s: &SymMatrix, tol: f64) -> Result<EigenSolution> {
    let n = h.n();
    if s.n() != n {
        return Err(Error::invalid(format!("H is {n}x{n} but S is {0}x{0}", s.n())));
    }
    if !h.is_finite() || !s.is_finite() {
        return Err(Error::invalid("non-finite matrix entry"));
    }
    let l = cholesky(s)?;

    // A = L⁻¹ H L⁻ᵀ, built column by column: X = L⁻¹ H, then A = L⁻¹ Xᵀ.
    let mut x: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| h.get(i, j)).collect()).collect();
    for col in x.iter_mut() {
        l.solve_lower(col);
    }
    let mut a_cols: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| x[j][i]).collect()).collect();
    for col in a_cols.iter_mut() {
        l.solve_lower(col);
    }
    let a = SymMatrix::from_fn(n, |i, j| 0.5 * (a_cols[j][i] + a_cols[i][j]));

    let (mut values, ys) = jacobi_eigen(&a, tol)?;
    let mut vectors: Vec<Vec<f64>> = ys
        .into_iter()
        .map(|mut y| {
            l.solve_upper_t(&mut y);
            fix_sign(&mut y);
            y
        })
        .collect();
    sort_eigenpairs(&mut values, &mut vectors);

    let residual_norms = values
        .iter()
        .zip(&vectors)
        .map(|(e, c)| {
            let hc = h.mul_vec(c);
            let sc = s.mul_vec(c);
            hc.iter().zip(&sc).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    Ok(EigenSolution { eigenvalues: values, eigenvectors: vectors, residual_norms })
}
