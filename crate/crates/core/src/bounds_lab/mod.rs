//! Bound bookkeeping and the numerical machinery behind the upper-bound
//! arguments: rank estimates, lattice rounding, polynomial approximation of
//! |t|^p, Smyth matrices and the Alon–Pudlák min-embedding.

use thiserror::Error;

use crate::norms::NormError;

mod alon_pudlak;
mod approx;
mod classify;
mod lattice;
mod ledger;
mod rank;
mod smyth;

pub use alon_pudlak::{
    ap_error_moments, ap_partition, ap_vectors, nonnegative_lift, signed_product, ApVectors,
    CoordinatePartition, ErrorMoments, Interval, IntervalClass, IntervalPartition,
    PartitionStats, DEFAULT_AP_CONSTANT,
};
pub use approx::{minimax_abs_p, ApproxPolynomial, Basis, SUP_GRID_POINTS};
pub use classify::e2_classify;
pub use lattice::{lattice_round, lattice_window, LatticeRounding};
pub use ledger::{known_bounds, Bound, BoundReport, NormFamily};
pub use rank::{
    approx_identity_certificate, numerical_rank, rank_lower_bound, IdentityCertificate,
};
pub use smyth::{smyth_matrix, SmythMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("diagonal entry {0} is {1}, expected 1")]
    NonUnitDiagonal(usize, f64),
    #[error("point {point}, coordinate {coord} = {value} lies outside [0, 1]")]
    OutOfUnitCube {
        point: usize,
        coord: usize,
        value: f64,
    },
    #[error("row {0} does not sum to 1")]
    NotNormalized(usize),
    #[error("points are not 1-equilateral (largest deviation {0})")]
    NotEquilateral(f64),
    #[error("{0} lies on a breakpoint")]
    OnBreakpoint(f64),
    #[error("{0} and {1} do not lie in the same interval")]
    DifferentIntervals(f64, f64),
    #[error(transparent)]
    Norm(#[from] NormError),
}

impl LabError {
    pub fn is_numerical(&self) -> bool {
        match self {
            LabError::Norm(e) => e.is_numerical(),
            _ => false,
        }
    }
}

pub(crate) fn square_matrix(a: &[Vec<f64>]) -> Result<usize, LabError> {
    let n = a.len();
    if n == 0 {
        return Err(LabError::Argument("matrix is empty".into()));
    }
    if let Some(i) = a.iter().position(|r| r.len() != n) {
        return Err(LabError::Argument(format!("row {i} has {} entries", a[i].len())));
    }
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(LabError::Argument("matrix has non-finite entries".into()));
    }
    Ok(n)
}

pub(crate) fn symmetric_matrix(a: &[Vec<f64>]) -> Result<usize, LabError> {
    let n = square_matrix(a)?;
    let scale = a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    for i in 0..n {
        for j in i + 1..n {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                return Err(LabError::NotSymmetric(i, j));
            }
        }
    }
    Ok(n)
}
