//! Thin helpers over `nalgebra` for symmetric matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigen-decomposition with eigenvalues sorted nonincreasing; the columns of
/// `vectors` follow the same order.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn check_symmetric(m: &DMatrix<f64>, rel_tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::domain(format!(
            "matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > rel_tol * scale {
                return Err(Error::domain(format!(
                    "matrix is not symmetric: |m[{i},{j}] - m[{j},{i}]| = {d:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Symmetrizes before decomposing so that round-off asymmetry cannot leak in.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> SymEigen {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let n = m.nrows();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SymEigen {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors,
    }
}

/// Schatten-one (nuclear) norm of a symmetric matrix.
pub fn schatten1_sym(m: &DMatrix<f64>) -> f64 {
    sym_eigen_desc(m).values.iter().map(|v| v.abs()).sum()
}

/// Operator norm of a symmetric matrix.
pub fn operator_norm_sym(m: &DMatrix<f64>) -> f64 {
    sym_eigen_desc(m)
        .values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

pub fn trace(m: &DMatrix<f64>) -> f64 {
    m.trace()
}

/// `S^{-1/2}` for a strictly positive definite symmetric matrix.
///
/// Fails when the smallest eigenvalue is not above `rel_tol·λ_max`.
pub fn inv_sqrt_pd(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    check_symmetric(m, 1e-10)?;
    let eig = sym_eigen_desc(m);
    let max = eig.values.first().copied().unwrap_or(0.0);
    let min = eig.values.last().copied().unwrap_or(0.0);
    if !(max > 0.0) || min <= rel_tol * max {
        return Err(Error::domain(format!(
            "covariance is singular or not positive definite (eigenvalues in [{min:e}, {max:e}])"
        )));
    }
    let n = m.nrows();
    let mut d = DMatrix::zeros(n, n);
    for (i, v) in eig.values.iter().enumerate() {
        d[(i, i)] = 1.0 / v.sqrt();
    }
    Ok(&eig.vectors * d * eig.vectors.transpose())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigen_desc(m).values.last().copied().unwrap_or(0.0)
}
