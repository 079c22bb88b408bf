use serde::Serialize;

use super::LabError;
use crate::constructions::PointSet;
use crate::norms::{Exponent, NormSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeRounding {
    pub grid: u64,
    /// Shift applied to each coordinate before rounding.
    pub translation: Vec<f64>,
    pub rounded: Vec<Vec<f64>>,
    /// Q_ij = 1 − ‖q_i − q_j‖_p^p.
    pub q: Vec<Vec<f64>>,
    /// max |Q_ij − δ_ij|.
    pub max_deviation: f64,
    pub max_rounding_error: f64,
}

/// Nearest multiple of 1/N, ties going to the lower multiple.
pub fn round_to_grid(x: f64, grid: u64) -> f64 {
    let n = grid as f64;
    (x * n - 0.5).ceil() / n
}

/// Smallest N with (e−1)·p·n^{1/p}·√m ≤ N and N + 1 ≤ e·p·n^{1/p}·√m, if
/// the window contains an integer.
pub fn lattice_window(p: f64, n: usize, m: usize) -> Option<u64> {
    let base = p * (n as f64).powf(1.0 / p) * (m as f64).sqrt();
    let lo = (std::f64::consts::E - 1.0) * base;
    let hi = std::f64::consts::E * base;
    let grid = lo.ceil();
    (grid >= 1.0 && grid + 1.0 <= hi).then_some(grid as u64)
}

/// Rounds every coordinate to the lattice (1/N)ℤ^n and forms
/// Q = [1 − ‖q_i − q_j‖_p^p].
///
/// Coordinates are first shifted into [0, 1]: up by the minimum when it is
/// negative, down by the excess when the maximum exceeds 1.
pub fn lattice_round(set: &PointSet, grid: u64) -> Result<LatticeRounding, LabError> {
    let p = match set.norm {
        NormSpec::Lp { p: Exponent::Finite(p) } => p,
        _ => return Err(LabError::Argument("lattice rounding needs a finite l_p norm".into())),
    };
    if grid == 0 {
        return Err(LabError::Argument("grid size must be positive".into()));
    }
    if set.points.iter().any(|x| x.len() != set.n) {
        return Err(LabError::Argument("inconsistent point dimensions".into()));
    }
    let n = set.n;
    let translation: Vec<f64> = (0..n)
        .map(|k| {
            let lo = set.points.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min);
            let hi = set.points.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max);
            if lo < 0.0 {
                -lo
            } else if hi > 1.0 {
                1.0 - hi
            } else {
                0.0
            }
        })
        .collect();

    let mut rounded = Vec::with_capacity(set.len());
    let mut max_rounding_error = 0.0_f64;
    for (i, x) in set.points.iter().enumerate() {
        let mut q = Vec::with_capacity(n);
        for k in 0..n {
            let v = x[k] + translation[k];
            if !(0.0..=1.0).contains(&v) {
                return Err(LabError::OutOfUnitCube {
                    point: i,
                    coord: k,
                    value: v,
                });
            }
            let r = round_to_grid(v, grid);
            max_rounding_error = max_rounding_error.max((r - v).abs());
            q.push(r);
        }
        rounded.push(q);
    }

    let m = rounded.len();
    let mut q = vec![vec![1.0; m]; m];
    let mut max_deviation = 0.0_f64;
    for i in 0..m {
        for j in i + 1..m {
            let s: f64 = rounded[i]
                .iter()
                .zip(&rounded[j])
                .map(|(a, b)| if p == 1.0 { (a - b).abs() } else { (a - b).abs().powf(p) })
                .sum();
            let v = 1.0 - s;
            q[i][j] = v;
            q[j][i] = v;
            max_deviation = max_deviation.max(v.abs());
        }
    }
    Ok(LatticeRounding {
        grid,
        translation,
        rounded,
        q,
        max_deviation,
        max_rounding_error,
    })
}
