//! Dense linear-algebra kernel.
//!
//! Small row-major matrices and vectors in double precision, with exactly the
//! operations the rest of the crate needs: Frobenius and spectral norms,
//! Cholesky factorization with solves, and a cyclic Jacobi eigensolver for
//! symmetric matrices (used for symmetric square roots; the spectral norm
//! itself is power iteration, since its consumers only need the top
//! eigenvalue). All operations are pure functions on immutable inputs.

use crate::seed::{Seed, SplitMix64};
use crate::{Error, Result};

/// Iteration cap for power iteration.
pub const POWER_ITERATION_CAP: usize = 100_000;

/// Default convergence tolerance for the spectral norm.
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    /// Wraps entries without validation; use [`Vector::checked`] for
    /// untrusted input.
    pub fn new(data: Vec<f64>) -> Self {
        Vector { data }
    }

    /// Validates that every entry is finite.
    pub fn checked(data: Vec<f64>) -> Result<Self> {
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("vector entry {i}")));
        }
        Ok(Vector { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            data: vec![0.0; dim],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut v = Self::zeros(dim);
        v.data[index] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dims");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Vector {
        Vector {
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Wraps entries without finiteness validation; panics if the entry count
    /// does not match the shape.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "matrix data length {} does not match {rows}x{cols}",
            data.len()
        );
        Matrix { rows, cols, data }
    }

    /// Validates shape and finiteness.
    pub fn checked(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!(
                "matrix entry ({}, {})",
                i / cols,
                i % cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vector {
        Vector::new((0..self.rows).map(|r| self[(r, c)]).collect())
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn matvec(&self, x: &Vector) -> Vector {
        assert_eq!(self.cols, x.dim(), "matvec dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for r in 0..self.rows {
            out[r] = self.row(r).iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        }
        Vector::new(out)
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// Adds `c * v vᵀ` in place (symmetric rank-one update).
    pub fn rank_one_update(&mut self, v: &Vector, c: f64) {
        assert!(self.is_square() && self.rows == v.dim());
        let n = self.rows;
        for i in 0..n {
            let ci = c * v[i];
            if ci == 0.0 {
                continue;
            }
            for j in 0..n {
                self.data[i * n + j] += ci * v[j];
            }
        }
    }

    /// Square root of the sum of squared entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Largest absolute difference between the matrix and its transpose.
    pub fn max_asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).abs());
            }
        }
        worst
    }

    /// Largest absolute eigenvalue of a symmetric matrix by power iteration.
    ///
    /// Each step applies the matrix twice (i.e. iterates on A²), so
    /// eigenvalue pairs of opposite sign do not stall convergence. Stops once
    /// successive estimates differ by less than `tol` (capped at
    /// [`POWER_ITERATION_CAP`] iterations); the starting vector is drawn from
    /// a fixed seed so results are deterministic. Symmetry is required to
    /// within `tol * max(1, max |entry|)`.
    pub fn spectral_norm_symmetric(&self, tol: f64) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let asym = self.max_asymmetry();
        if asym > tol * self.max_abs_entry().max(1.0) {
            return Err(Error::NotSymmetric { max_asym: asym });
        }
        self.power_iteration_norm(tol)
    }

    /// Spectral norm (largest singular value) of a general matrix, computed
    /// as the square root of the top eigenvalue of AᵀA.
    pub fn spectral_norm(&self, tol: f64) -> Result<f64> {
        let gram = self.transpose().matmul(self);
        Ok(gram.power_iteration_norm(tol)?.sqrt())
    }

    fn power_iteration_norm(&self, tol: f64) -> Result<f64> {
        let n = self.rows;
        if n == 0 {
            return Ok(0.0);
        }
        if self.max_abs_entry() == 0.0 {
            return Ok(0.0);
        }
        let mut stream = SplitMix64::new(Seed(POWER_START_SEED));
        let mut v = random_unit(n, &mut stream);
        let mut prev = f64::INFINITY;
        let mut iterations = 0;
        while iterations < POWER_ITERATION_CAP {
            iterations += 1;
            let w = self.matvec(&v);
            let est = w.norm();
            // Random restart if the iterate fell into the null space.
            let w2 = self.matvec(&w);
            let n2 = w2.norm();
            if n2 < 1e-300 {
                if est < 1e-300 {
                    v = random_unit(n, &mut stream);
                    continue;
                }
                return Ok(est);
            }
            v = w2.scaled(1.0 / n2);
            if (est - prev).abs() < tol {
                return Ok(est);
            }
            prev = est;
        }
        Err(Error::NoConvergence {
            iterations: POWER_ITERATION_CAP,
        })
    }

    /// Cholesky factorization of a symmetric positive definite matrix. Only
    /// the lower triangle is read; a non-positive pivot is reported with its
    /// index.
    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = self[(j, j)];
            for k in 0..j {
                diag -= l[(j, k)] * l[(j, k)];
            }
            if !(diag > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: diag,
                });
            }
            let ljj = diag.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = sum / ljj;
            }
        }
        Ok(CholeskyFactor { lower: l })
    }

    /// Full eigendecomposition of a symmetric matrix by cyclic Jacobi
    /// rotations. Intended for small matrices (symmetric square roots,
    /// whitening); the spectral norm has its own power-iteration path.
    pub fn jacobi_eigen(&self) -> Result<SymmetricEigen> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let asym = self.max_asymmetry();
        if asym > 1e-9 * self.max_abs_entry().max(1.0) {
            return Err(Error::NotSymmetric { max_asym: asym });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut q = Matrix::identity(n);
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off.sqrt() <= 1e-14 * scale {
                let values = (0..n).map(|i| a[(i, i)]).collect();
                return Ok(SymmetricEigen { values, vectors: q });
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let apq = a[(i, j)];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a[(j, j)] - a[(i, i)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let aki = a[(k, i)];
                        let akj = a[(k, j)];
                        a[(k, i)] = c * aki - s * akj;
                        a[(k, j)] = s * aki + c * akj;
                    }
                    for k in 0..n {
                        let aik = a[(i, k)];
                        let ajk = a[(j, k)];
                        a[(i, k)] = c * aik - s * ajk;
                        a[(j, k)] = s * aik + c * ajk;
                    }
                    for k in 0..n {
                        let qki = q[(k, i)];
                        let qkj = q[(k, j)];
                        q[(k, i)] = c * qki - s * qkj;
                        q[(k, j)] = s * qki + c * qkj;
                    }
                }
            }
        }
        Err(Error::NoConvergence { iterations: 100 })
    }

    /// Symmetric square root Q Λ^{1/2} Qᵀ of a symmetric PSD matrix.
    pub fn symmetric_sqrt(&self) -> Result<Matrix> {
        let eig = self.jacobi_eigen()?;
        let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut roots = Vec::with_capacity(eig.values.len());
        for (i, &v) in eig.values.iter().enumerate() {
            if v < -1e-10 * scale.max(1.0) {
                return Err(Error::NotPositiveDefinite { pivot: i, value: v });
            }
            roots.push(v.max(0.0).sqrt());
        }
        Ok(eig.vectors.mul_diag_mul_t(&roots))
    }

    /// Inverse symmetric square root Q Λ^{-1/2} Qᵀ of a symmetric positive
    /// definite matrix.
    pub fn symmetric_inv_sqrt(&self) -> Result<Matrix> {
        let eig = self.jacobi_eigen()?;
        let mut roots = Vec::with_capacity(eig.values.len());
        for (i, &v) in eig.values.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: i, value: v });
            }
            roots.push(1.0 / v.sqrt());
        }
        Ok(eig.vectors.mul_diag_mul_t(&roots))
    }

    /// Q diag(d) Qᵀ where `self` is Q.
    fn mul_diag_mul_t(&self, d: &[f64]) -> Matrix {
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut sum = 0.0;
                for k in 0..n {
                    sum += self[(i, k)] * d[k] * self[(j, k)];
                }
                out[(i, j)] = sum;
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Fixed start seed for power iteration: any constant works, it only has to
/// be documented and deterministic.
const POWER_START_SEED: u64 = 0x0005_EED0_0B17_F00D;

fn random_unit(n: usize, stream: &mut SplitMix64) -> Vector {
    loop {
        let v = Vector::new((0..n).map(|_| 2.0 * stream.next_f64() - 1.0).collect());
        let norm = v.norm();
        if norm > 1e-3 {
            return v.scaled(1.0 / norm);
        }
    }
}

/// Lower-triangular Cholesky factor L with L Lᵀ = P.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: Matrix,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    /// Solves P x = b by forward/backward substitution.
    pub fn solve(&self, b: &Vector) -> Vector {
        let n = self.lower.rows();
        assert_eq!(b.dim(), n, "solve dimension mismatch");
        let l = &self.lower;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= l[(i, k)] * y[k];
            }
            y[i] = sum / l[(i, i)];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= l[(k, i)] * x[k];
            }
            x[i] = sum / l[(i, i)];
        }
        Vector::new(x)
    }

    /// Solves P X = B column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        let n = self.lower.rows();
        assert_eq!(b.rows(), n, "solve dimension mismatch");
        let mut out = Matrix::zeros(n, b.cols());
        for c in 0..b.cols() {
            let x = self.solve(&b.column(c));
            for r in 0..n {
                out[(r, c)] = x[r];
            }
        }
        out
    }

    /// P⁻¹ as a dense matrix (column-wise solves against the identity).
    pub fn inverse(&self) -> Matrix {
        self.solve_matrix(&Matrix::identity(self.lower.rows()))
    }

    /// Cheap condition estimate from the factor diagonal:
    /// `(max_i L_ii / min_i L_ii)²` lower-bounds the condition number of P.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.lower.rows();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let d = self.lower[(i, i)];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let ratio = hi / lo;
        ratio * ratio
    }
}

/// Eigenvalues and an orthogonal matrix whose columns are the corresponding
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}
