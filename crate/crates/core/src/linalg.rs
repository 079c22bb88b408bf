// Small dense helpers shared across modules.

use nalgebra::DMatrix;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Number of singular values above `rel_tol * sigma_max`.
pub(crate) fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Rank of a list of row vectors.
pub(crate) fn rows_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    numerical_rank(&m, rel_tol)
}

pub(crate) fn to_dmatrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}
