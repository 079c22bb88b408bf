use serde::Serialize;

use super::{ApproxPolynomial, LabError};
use crate::constructions::PointSet;
use crate::norms::{Exponent, NormSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmythMatrix {
    /// a_ij = 1 − Σ_k P(p_i^(k) − p_j^(k)).
    pub a: Vec<Vec<f64>>,
    pub unit_diagonal: bool,
    pub max_offdiag: f64,
    /// n · sup_error(P), which bounds every off-diagonal entry.
    pub offdiag_bound: f64,
}

/// The matrix that approximates the identity when `set` is 1-equilateral in
/// ℓ_p and P approximates |t|^p.
pub fn smyth_matrix(set: &PointSet, poly: &ApproxPolynomial) -> Result<SmythMatrix, LabError> {
    let p = match set.norm {
        NormSpec::Lp { p: Exponent::Finite(p) } => p,
        _ => return Err(LabError::Argument("Smyth matrices need a finite l_p norm".into())),
    };
    if p != poly.p {
        return Err(LabError::Argument(format!(
            "polynomial approximates |t|^{} but the norm is l_{p}",
            poly.p
        )));
    }
    let m = set.len();
    let mut deviation = 0.0_f64;
    for i in 0..m {
        for j in i + 1..m {
            let d = set.norm.dist(&set.points[i], &set.points[j])?;
            deviation = deviation.max((d - 1.0).abs());
        }
    }
    if deviation > 1e-9 {
        return Err(LabError::NotEquilateral(deviation));
    }

    let mut a = vec![vec![0.0; m]; m];
    let mut max_offdiag = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            let s: f64 = set.points[i]
                .iter()
                .zip(&set.points[j])
                .map(|(x, y)| poly.eval(x - y))
                .sum();
            a[i][j] = 1.0 - s;
            if i != j {
                max_offdiag = max_offdiag.max(a[i][j].abs());
            }
        }
    }
    Ok(SmythMatrix {
        unit_diagonal: (0..m).all(|i| a[i][i] == 1.0),
        a,
        max_offdiag,
        offdiag_bound: set.n as f64 * poly.sup_error,
    })
}
