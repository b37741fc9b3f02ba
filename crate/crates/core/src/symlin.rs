//! Dense symmetric-matrix kernels.
//!
//! Everything here works on small dense matrices (pencil blocks of a few
//! dozen rows at most). Eigendecompositions use cyclic Jacobi rotations, which
//! are slow for big matrices but accurate for the tiny eigenvalues that decide
//! semidefiniteness.

use std::fmt;

use crate::error::{Error, Result};

/// Relative scale used by every default tolerance: `1 + ‖A‖_F`.
pub fn scale_of(a: &SymmetricMatrix) -> f64 {
    1.0 + a.frobenius_norm()
}

/// A dense real symmetric matrix stored row-major.
///
/// Construction symmetrizes the input as `(A + Aᵀ) / 2`, so round-off from
/// block assembly never leaves a matrix that is "almost" symmetric.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds a matrix from row-major entries, symmetrizing by averaging.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        let mut m = SymmetricMatrix { dim, data };
        m.symmetrize();
        Ok(m)
    }

    /// Builds a matrix from rows. Asymmetric input is averaged with its transpose.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        SymmetricMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    /// Block-diagonal assembly of the given matrices.
    pub fn block_diag(blocks: &[&SymmetricMatrix]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = Self::zeros(dim);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m.data[(off + i) * dim + off + j] = b.get(i, j);
                }
            }
            off += b.dim;
        }
        m
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    /// True when the stored entries were not symmetric before averaging.
    pub fn is_asymmetric(dim: usize, data: &[f64]) -> bool {
        (0..dim).any(|i| ((i + 1)..dim).any(|j| data[i * dim + j] != data[j * dim + i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SymmetricMatrix { dim: self.dim, data: self.data.iter().map(|v| alpha * v).collect() }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SymmetricMatrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in axpy");
        if alpha == 0.0 {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn add(&self, other: &SymmetricMatrix) -> Self {
        let mut m = self.clone();
        m.axpy(1.0, other);
        m
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> Self {
        let mut m = self.clone();
        m.axpy(-1.0, other);
        m
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix { rows: self.dim, cols: self.dim, data: self.data.clone() }
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(self)?.eigenvalues[0])
    }
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

/// A dense rectangular matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::InvalidInput("ragged matrix rows".into()));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest singular value, through the eigenvalues of `MᵀM`.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = self.transpose().matmul(self);
        let gram = SymmetricMatrix::new(gram.cols, gram.data).expect("square gram matrix");
        let ev = eigh(&gram).expect("finite gram matrix");
        ev.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Interprets a square matrix as symmetric (averaging off-diagonal pairs).
    pub fn to_symmetric(&self) -> Result<SymmetricMatrix> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        SymmetricMatrix::new(self.rows, self.data.clone())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cols == 0 {
            return write!(f, "Matrix({}x0)", self.rows);
        }
        f.debug_list().entries(self.data.chunks(self.cols)).finish()
    }
}

/// Orthonormal basis of a linear subspace of `ℝⁿ`, stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<f64>>,
}

/// Vectors whose norm falls below this fraction of their original norm during
/// Gram–Schmidt are treated as dependent and dropped.
const DEPENDENCE_RATIO: f64 = 1e-10;

impl Subspace {
    /// The zero subspace `{0}`.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    /// The whole space `ℝⁿ` with the standard basis.
    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut e = vec![0.0; ambient_dim];
                e[i] = 1.0;
                e
            })
            .collect();
        Subspace { ambient_dim, basis }
    }

    /// Span of arbitrary vectors, orthonormalized by modified Gram–Schmidt with
    /// a second re-orthogonalization pass. Dependent vectors are dropped.
    pub fn span(ambient_dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::InvalidInput(format!(
                    "vector of length {} in a subspace of R^{ambient_dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite basis vector".into()));
            }
            let original = norm(v);
            if original == 0.0 {
                continue;
            }
            let mut w = v.clone();
            for _pass in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let n = norm(&w);
            if n > DEPENDENCE_RATIO * original {
                w.iter_mut().for_each(|x| *x /= n);
                basis.push(w);
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension `r` of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.ambient_dim, &self.basis)
    }

    /// Orthogonal projector `U Uᵀ` onto the subspace.
    pub fn projector(&self) -> SymmetricMatrix {
        let n = self.ambient_dim;
        let mut p = SymmetricMatrix::zeros(n.max(1));
        for b in &self.basis {
            for i in 0..n {
                for j in i..n {
                    let v = p.get(i, j) + b[i] * b[j];
                    p.set(i, j, v);
                }
            }
        }
        p
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.ambient_dim;
        let mut vectors = self.basis.clone();
        vectors.extend(Subspace::full(n).basis);
        let all = Subspace::span(n, &vectors).expect("finite vectors");
        Subspace { ambient_dim: n, basis: all.basis[self.basis.len()..].to_vec() }
    }

    /// Containment `self ⊆ other`, tested as `‖(I − P_other) · U_self‖ ≤ tol`
    /// so the answer does not depend on basis choice.
    pub fn is_contained_in(&self, other: &Subspace, tol: f64) -> bool {
        assert_eq!(self.ambient_dim, other.ambient_dim, "ambient dimension mismatch");
        let mut worst = 0.0_f64;
        for u in &self.basis {
            let mut r = u.clone();
            for b in &other.basis {
                let c = dot(u, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
            worst = worst.max(norm(&r));
        }
        worst <= tol
    }

    /// Largest deviation of `UᵀU` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenvalues in ascending order paired with the columns of an orthogonal matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    /// `Q · diag(f(λ)) · Qᵀ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let n = self.eigenvalues.len();
        let mut out = SymmetricMatrix::zeros(n);
        for (k, lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = self.vectors.get(i, k) * w;
                for j in i..n {
                    let v = out.get(i, j) + qi * self.vectors.get(j, k);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.map_spectrum(|l| l)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }
}

const MAX_SWEEPS: usize = 60;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm is below
/// `1e-12 · (1 + ‖A‖_F)`; one more sweep is then applied, which squares the
/// remaining off-diagonal mass thanks to quadratic convergence.
pub fn eigh(a: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let n = a.dim();
    let mut m = a.data.clone();
    let mut q = Matrix::identity(n);
    let threshold = 1e-12 * scale_of(a);
    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut polish = 1;
    for _sweep in 0..MAX_SWEEPS {
        if off_norm(&m) < threshold {
            if polish == 0 {
                break;
            }
            polish -= 1;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = m[p * n + r];
                if apr == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let arr = m[r * n + r];
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkr = m[k * n + r];
                    m[k * n + p] = c * mkp - s * mkr;
                    m[k * n + r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mrk = m[r * n + k];
                    m[p * n + k] = c * mpk - s * mrk;
                    m[r * n + k] = s * mpk + c * mrk;
                }
                m[p * n + r] = 0.0;
                m[r * n + p] = 0.0;
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigenvalues = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, dst, q.get(k, src));
        }
    }
    Ok(EigenDecomposition { eigenvalues, vectors })
}

/// Default numerical-zero threshold for eigenvalues: `1e-8 · (1 + ‖A‖_F)`.
pub fn default_tol(a: &SymmetricMatrix) -> f64 {
    1e-8 * scale_of(a)
}

/// Span of the eigenvectors whose eigenvalues satisfy `|λ| ≤ tol`.
pub fn kernel_basis(a: &SymmetricMatrix, tol: f64) -> Result<Subspace> {
    let ev = eigh(a)?;
    let vectors: Vec<Vec<f64>> = ev
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.abs() <= tol)
        .map(|(k, _)| ev.eigenvector(k))
        .collect();
    Subspace::span(a.dim(), &vectors)
}

/// Number of eigenvalues with `|λ| > tol`.
pub fn rank(a: &SymmetricMatrix, tol: f64) -> Result<usize> {
    Ok(eigh(a)?.eigenvalues.iter().filter(|l| l.abs() > tol).count())
}

/// Frobenius-nearest positive semidefinite matrix, `Q · diag(max(λ, 0)) · Qᵀ`.
pub fn psd_project(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    Ok(eigh(a)?.map_spectrum(|l| l.max(0.0)))
}

/// Moore–Penrose pseudoinverse, inverting only eigenvalues with `|λ| > tol`.
pub fn pseudoinverse(a: &SymmetricMatrix, tol: f64) -> Result<SymmetricMatrix> {
    Ok(eigh(a)?.map_spectrum(|l| if l.abs() > tol { 1.0 / l } else { 0.0 }))
}
