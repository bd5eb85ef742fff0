//! Thin dense helpers over `faer`.

use faer::{Mat, Side};

use crate::error::{PascoError, Result};

/// Symmetric eigendecomposition of the row-major `n × n` matrix `a`.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors,
/// column `j` stored at `vectors[j * n..(j + 1) * n]`.
pub fn symmetric_eigen(n: usize, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| PascoError::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let values: Vec<f64> = order.iter().map(|&j| s[j]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(PascoError::Eigen("non-finite eigenvalue".into()));
    }
    let mut vectors = Vec::with_capacity(n * n);
    for &j in &order {
        vectors.extend((0..n).map(|i| u[(i, j)]));
    }
    Ok((values, vectors))
}

/// Solves `a x = b` for a symmetric positive definite row-major `a`.
pub fn solve_spd(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    let llt = m
        .llt(Side::Lower)
        .map_err(|e| PascoError::Eigen(format!("cholesky failed: {e:?}")))?;
    let x = faer::linalg::solvers::Solve::solve(&llt, &rhs);
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}
