//! Dense symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Every iterate in this crate is a [`SymMatrix`]. Entries are stored as the
//! full square in row-major order; constructors symmetrize their input as
//! `(A + Aᵀ) / 2` and every arithmetic operation preserves exact symmetry.

use std::fmt;

use thiserror::Error;

/// Converged when the off-diagonal Frobenius norm drops below this fraction of `‖A‖_F`.
const JACOBI_REL_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("expected {expected} entries for a square matrix, got {actual}")]
    BadLength { expected: usize, actual: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
}

/// Dense `n × n` real symmetric matrix.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from `dim * dim` row-major entries, symmetrizing them.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(LinalgError::BadLength { expected: dim * dim, actual: entries.len() });
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { row: pos / dim, col: pos % dim });
        }
        let mut m = SymMatrix { dim, entries };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, actual: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    /// Builds `(f(i,j) + f(j,i)) / 2` for every entry.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, LinalgError> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, entries)
    }

    /// Fills the upper triangle (diagonal included) in row-major order and mirrors it.
    ///
    /// Unlike [`SymMatrix::from_fn`] no averaging takes place, so each stored value is
    /// exactly one draw of `f`.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        Ok(SymMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        SymMatrix { dim, entries: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self, LinalgError> {
        let dim = diag.len();
        Self::from_upper(dim, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// `scale · x xᵀ`.
    pub fn rank_one(x: &[f64], scale: f64) -> Self {
        let dim = x.len();
        let mut m = Self::zeros(dim);
        m.add_rank_one(scale, x);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// Row-major view of all `dim²` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius inner product `Σ X_ij · Y_ij`.
    pub fn dot(&self, other: &SymMatrix) -> Result<f64, LinalgError> {
        self.check_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum())
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "vector length must match matrix dimension");
        let mut acc = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            let r: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += xi * r;
        }
        acc
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `self += a · other`. Panics when dimensions differ.
    pub fn add_scaled(&mut self, a: f64, other: &SymMatrix) {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        for (x, y) in self.entries.iter_mut().zip(&other.entries) {
            *x += a * y;
        }
    }

    /// `self += scale · x xᵀ`.
    pub fn add_rank_one(&mut self, scale: f64, x: &[f64]) {
        assert_eq!(x.len(), self.dim, "vector length must match matrix dimension");
        let n = self.dim;
        for i in 0..n {
            let si = scale * x[i];
            let row = &mut self.entries[i * n..(i + 1) * n];
            for (r, xj) in row.iter_mut().zip(x) {
                *r += si * xj;
            }
        }
    }

    pub fn scale_mut(&mut self, a: f64) {
        for x in &mut self.entries {
            *x *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> SymMatrix {
        let mut m = self.clone();
        m.scale_mut(a);
        m
    }

    /// `self + a · other` as a new matrix. Panics when dimensions differ.
    pub fn plus_scaled(&self, a: f64, other: &SymMatrix) -> SymMatrix {
        let mut m = self.clone();
        m.add_scaled(a, other);
        m
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn sym_eig(&self) -> Result<EigDecomposition, LinalgError> {
        sym_eig(self)
    }

    fn check_dim(&self, other: &SymMatrix) -> Result<(), LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, actual: other.dim });
        }
        Ok(())
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i]);
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg;
            }
        }
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.entries.chunks(self.dim).collect();
        f.debug_struct("SymMatrix").field("dim", &self.dim).field("rows", &rows).finish()
    }
}

/// `a · X + Y`.
pub fn axpy(a: f64, x: &SymMatrix, y: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    x.check_dim(y)?;
    let mut out = y.clone();
    out.add_scaled(a, x);
    Ok(out)
}

pub fn dot(x: &SymMatrix, y: &SymMatrix) -> Result<f64, LinalgError> {
    x.dot(y)
}

pub fn frob_norm(x: &SymMatrix) -> f64 {
    x.frob_norm()
}

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    eigenvalues: Vec<f64>,
    /// Row-major `dim × dim`; column `i` pairs with `eigenvalues[i]`.
    eigenvectors: Vec<f64>,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Entry `(row, col)` of the eigenvector matrix `V`.
    pub fn eigenvector_entry(&self, row: usize, col: usize) -> f64 {
        self.eigenvectors[row * self.dim() + col]
    }

    pub fn eigenvector(&self, col: usize) -> Vec<f64> {
        (0..self.dim()).map(|row| self.eigenvector_entry(row, col)).collect()
    }

    /// `V · diag(λ) · Vᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.reconstruct_mapped(|l| l)
    }

    /// `V · diag(f(λ)) · Vᵀ`; computes the upper triangle and mirrors it.
    pub fn reconstruct_mapped(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (k, lk) in mapped.iter().enumerate() {
                    if *lk != 0.0 {
                        acc += v[i * n + k] * lk * v[j * n + k];
                    }
                }
                out.entries[i * n + j] = acc;
                out.entries[j * n + i] = acc;
            }
        }
        out
    }

    /// `‖VᵀV − I‖_F`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let g: f64 = (0..n).map(|k| v[k * n + a] * v[k * n + b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                acc += (g - target) * (g - target);
            }
        }
        acc.sqrt()
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    acc.sqrt()
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(matrix: &SymMatrix) -> Result<EigDecomposition, LinalgError> {
    let n = matrix.dim;
    let mut a = matrix.entries.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let tol = JACOBI_REL_TOL * matrix.frob_norm();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[r * n + new_col] = v[r * n + old_col];
        }
    }
    Ok(EigDecomposition { eigenvalues, eigenvectors })
}
