use serde::Serialize;

use super::{square_matrix, symmetric_matrix, LabError};
use crate::linalg::{self, to_dmatrix};

/// Relative singular value threshold used for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

/// Number of singular values above 1e−9·σ_max.
pub fn numerical_rank(a: &[Vec<f64>]) -> Result<usize, LabError> {
    square_matrix(a)?;
    Ok(linalg::numerical_rank(&to_dmatrix(a), RANK_TOL))
}

/// The rank lemma: rank A ≥ (tr A)² / Σ a_ij².
pub fn rank_lower_bound(a: &[Vec<f64>]) -> Result<f64, LabError> {
    let n = symmetric_matrix(a)?;
    let frob: f64 = a.iter().flatten().map(|x| x * x).sum();
    if frob == 0.0 {
        return Err(LabError::ZeroMatrix);
    }
    let trace: f64 = (0..n).map(|i| a[i][i]).sum();
    Ok(trace * trace / frob)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCertificate {
    pub n: usize,
    /// Largest off-diagonal magnitude.
    pub epsilon: f64,
    /// rank A ≥ n / (1 + (n−1)ε²).
    pub bound: f64,
    /// ε < 1/(n−1): the matrix is strictly diagonally dominant, hence of
    /// full rank.
    pub diagonally_dominant: bool,
}

/// Rank certificate for a symmetric matrix with unit diagonal.
pub fn approx_identity_certificate(a: &[Vec<f64>]) -> Result<IdentityCertificate, LabError> {
    let n = symmetric_matrix(a)?;
    if let Some(i) = (0..n).find(|&i| (a[i][i] - 1.0).abs() > 1e-12) {
        return Err(LabError::NonUnitDiagonal(i, a[i][i]));
    }
    let mut epsilon = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                epsilon = epsilon.max(a[i][j].abs());
            }
        }
    }
    let nf = n as f64;
    Ok(IdentityCertificate {
        n,
        epsilon,
        bound: nf / (1.0 + (nf - 1.0) * epsilon * epsilon),
        diagonally_dominant: n == 1 || epsilon < 1.0 / (nf - 1.0),
    })
}
