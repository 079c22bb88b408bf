use serde::Serialize;

use super::{check_points, SearchError};
use crate::norms::NormSpec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub ok: bool,
    /// Mean pairwise distance.
    pub lambda: f64,
    /// max |d(x, y) − λ| / λ over distinct pairs.
    pub max_deviation: f64,
}

/// Decides whether every pairwise distance lies within `tol · λ` of the mean
/// distance λ.
pub fn verify_equilateral(
    points: &[Vec<f64>],
    norm: &NormSpec,
    tol: f64,
) -> Result<Verification, SearchError> {
    if points.len() < 2 {
        return Err(SearchError::Argument(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(SearchError::Argument(format!("tolerance {tol} must be finite and >= 0")));
    }
    check_points(points, norm)?;

    let m = points.len();
    let mut dists = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let d = norm.dist(&points[i], &points[j])?;
            if d == 0.0 {
                return Err(SearchError::DuplicatePoints(i, j));
            }
            dists.push(d);
        }
    }
    let lo = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = dists.iter().copied().fold(0.0, f64::max);
    // Exact when all distances agree, so integer-distance sets pass at tol 0.
    let lambda = if lo == hi {
        lo
    } else {
        dists.iter().sum::<f64>() / dists.len() as f64
    };
    let spread = dists.iter().map(|d| (d - lambda).abs()).fold(0.0, f64::max);
    Ok(Verification {
        ok: spread <= tol * lambda,
        lambda,
        max_deviation: spread / lambda,
    })
}
