//! Small dense real linear algebra: symmetric eigendecomposition via cyclic
//! Jacobi rotations, Cholesky solves, and minimum-norm least squares.
//!
//! Problem sizes are desk scale (state dimensions around 10-50), so the
//! implementations favor robustness over speed.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { pivot: f64, index: usize },
    #[error("non-finite entry in matrix or vector")]
    NonFinite,
}

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(NumericsError::Dimension("empty matrix".into()));
        }
        let cols = rows[0].len();
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(NumericsError::Dimension("ragged rows".into()));
            }
            entries.extend_from_slice(r);
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, NumericsError> {
        if x.len() != self.cols {
            return Err(NumericsError::Dimension(format!(
                "matvec: {} cols vs vector length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), x))
            .collect())
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Gram matrix `AᵀA`.
    pub fn gram(&self) -> DenseMatrix {
        let mut g = DenseMatrix::zeros(self.cols, self.cols);
        for k in 0..self.rows {
            let r = self.row(k);
            for i in 0..self.cols {
                for j in i..self.cols {
                    g.add_to(i, j, r[i] * r[j]);
                }
            }
        }
        for i in 0..self.cols {
            for j in 0..i {
                let v = g.get(j, i);
                g.set(i, j, v);
            }
        }
        g
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest relative off-symmetry `|a_ij - a_ji| / (1 + max|a|)`.
    pub fn asymmetry(&self) -> f64 {
        let scale = 1.0 + self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs() / scale);
            }
        }
        worst
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending,
/// eigenvectors stored as orthonormal columns paired with the eigenvalues.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    /// Column `k` of this matrix is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: DenseMatrix,
}

impl SymEig {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors.get(i, k))
            .collect()
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn second_smallest(&self) -> f64 {
        self.eigenvalues[1]
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eigen(s: &DenseMatrix) -> Result<SymEig, NumericsError> {
    if !s.is_square() {
        return Err(NumericsError::Dimension(format!(
            "sym_eigen expects a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let asym = s.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(NumericsError::NotSymmetric(asym));
    }
    let n = s.rows();
    let mut a = s.clone();
    // Symmetrize exactly so rotations see a_ij == a_ji.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let mut v = DenseMatrix::identity(n);

    let off = |a: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a.get(i, j) * a.get(i, j);
            }
        }
        (2.0 * s).sqrt()
    };

    let scale = a.frobenius_norm().max(1e-300);
    let tol = 1e-15 * scale;
    for _sweep in 0..100 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s_ = t * c;
                // A <- JᵀAJ on rows/cols p,q
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s_ * akq);
                    a.set(k, q, s_ * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s_ * aqk);
                    a.set(q, k, s_ * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s_ * vkq);
                    v.set(k, q, s_ * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a.get(k, k)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, v.get(i, k));
        }
    }
    Ok(SymEig {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Cholesky factorization; lower triangle of the result holds `L` with `S = LLᵀ`.
fn cholesky(s: &DenseMatrix) -> Result<DenseMatrix, NumericsError> {
    let n = s.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = s.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(NumericsError::NotPositiveDefinite {
                        pivot: sum,
                        index: i,
                    });
                }
                l.set(i, i, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solve `Sx = b` for symmetric positive-definite `S` via Cholesky.
pub fn solve_spd(s: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, NumericsError> {
    if !s.is_square() || s.rows() != b.len() {
        return Err(NumericsError::Dimension(format!(
            "solve_spd: matrix {}x{} vs rhs length {}",
            s.rows(),
            s.cols(),
            b.len()
        )));
    }
    let asym = s.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(NumericsError::NotSymmetric(asym));
    }
    let l = cholesky(s)?;
    let n = b.len();
    // forward substitution L y = b
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l.get(i, k) * y[k];
        }
        y[i] = sum / l.get(i, i);
    }
    // back substitution Lᵀ x = y
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l.get(k, i) * x[k];
        }
        x[i] = sum / l.get(i, i);
    }
    Ok(x)
}

/// Result of a minimum-norm least-squares solve.
#[derive(Debug, Clone)]
pub struct MinNormSolution {
    /// Minimum-norm minimizer of `‖z − Hy‖²`, orthogonal to the nullspace.
    pub y_min_norm: Vec<f64>,
    /// Orthonormal basis of the numerical nullspace of `H`.
    pub nullspace_basis: Vec<Vec<f64>>,
    /// `‖z − H·y_min_norm‖²`.
    pub min_residual: f64,
}

/// Minimum-norm least squares via eigendecomposition of `HᵀH`.
///
/// Eigenvalues at or below `rank_tol² · λ_max` count as null directions.
pub fn min_norm_least_squares(
    h: &DenseMatrix,
    z: &[f64],
    rank_tol: f64,
) -> Result<MinNormSolution, NumericsError> {
    if h.rows() == 0 || h.cols() == 0 {
        return Err(NumericsError::Dimension("empty matrix".into()));
    }
    if h.rows() < h.cols() {
        return Err(NumericsError::Dimension(format!(
            "expected at least as many rows as columns, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    if z.len() != h.rows() {
        return Err(NumericsError::Dimension(format!(
            "rhs length {} vs {} rows",
            z.len(),
            h.rows()
        )));
    }
    if rank_tol <= 0.0 {
        return Err(NumericsError::Dimension("rank_tol must be positive".into()));
    }
    let gram = h.gram();
    let eig = sym_eigen(&gram)?;
    let m = h.cols();
    let lambda_max = eig.eigenvalues[m - 1].max(0.0);
    let threshold = rank_tol * rank_tol * lambda_max;

    let ht = h.transpose();
    let htz = ht.matvec(z)?;

    let mut y = vec![0.0; m];
    let mut nullspace = Vec::new();
    for k in 0..m {
        let lambda = eig.eigenvalues[k];
        let vk = eig.eigenvector(k);
        if lambda <= threshold {
            nullspace.push(vk);
        } else {
            let coeff = dot(&vk, &htz) / lambda;
            axpy(coeff, &vk, &mut y);
        }
    }
    let hy = h.matvec(&y)?;
    let min_residual = z
        .iter()
        .zip(&hy)
        .map(|(zi, hi)| (zi - hi) * (zi - hi))
        .sum();
    Ok(MinNormSolution {
        y_min_norm: y,
        nullspace_basis: nullspace,
        min_residual,
    })
}
