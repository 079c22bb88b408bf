//! Cayley–Menger determinants, Euclidean embeddability of finite metrics and
//! the constructive embedding, plus the almost-equilateral thresholds γ_n.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest point count accepted by the determinant machinery.
pub const MAX_POINTS: usize = 50;
/// Default relative zero threshold for prefix determinants.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmError {
    #[error("subset is empty")]
    EmptySubset,
    #[error("index {0} is out of range")]
    Index(usize),
    #[error("index {0} appears twice")]
    Duplicate(usize),
    #[error("{0} points exceed the cap of {MAX_POINTS}")]
    TooLarge(usize),
    #[error("invalid distance matrix: {0}")]
    Invalid(String),
    #[error("gamma_n needs n >= 2, got {0}")]
    Dimension(usize),
    #[error("step {step}: squared height {value} is not positive, metric is not Euclidean")]
    NotEmbeddable { step: usize, value: f64 },
    #[error("step {step}: previous points are affinely dependent")]
    Singular { step: usize },
}

impl CmError {
    pub fn is_numerical(&self) -> bool {
        matches!(self, CmError::NotEmbeddable { .. } | CmError::Singular { .. })
    }
}

/// A finite metric given by its distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct DistanceMatrix {
    m: usize,
    rho: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    m: Option<usize>,
    rho: Vec<Vec<f64>>,
}

impl TryFrom<RawMatrix> for DistanceMatrix {
    type Error = CmError;

    fn try_from(raw: RawMatrix) -> Result<Self, CmError> {
        if let Some(m) = raw.m {
            if m != raw.rho.len() {
                return Err(CmError::Invalid(format!(
                    "m = {m} but rho has {} rows",
                    raw.rho.len()
                )));
            }
        }
        DistanceMatrix::new(raw.rho)
    }
}

impl DistanceMatrix {
    /// Checks symmetry, zero diagonal and positive off-diagonal entries.
    pub fn new(rho: Vec<Vec<f64>>) -> Result<Self, CmError> {
        let m = rho.len();
        for (i, row) in rho.iter().enumerate() {
            if row.len() != m {
                return Err(CmError::Invalid(format!("row {i} has {} entries", row.len())));
            }
            for (j, &r) in row.iter().enumerate() {
                if !r.is_finite() {
                    return Err(CmError::Invalid(format!("entry ({i},{j}) is not finite")));
                }
                if i == j && r != 0.0 {
                    return Err(CmError::Invalid(format!("diagonal entry {i} is {r}")));
                }
                if i != j && r <= 0.0 {
                    return Err(CmError::Invalid(format!("entry ({i},{j}) = {r} is not positive")));
                }
                if r != rho[j][i] {
                    return Err(CmError::Invalid(format!("not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(DistanceMatrix { m, rho })
    }

    /// Euclidean distances between the given points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self, CmError> {
        let m = points.len();
        let mut rho = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let d = crate::linalg::norm2(&crate::linalg::sub(&points[i], &points[j]));
                rho[i][j] = d;
                rho[j][i] = d;
            }
        }
        DistanceMatrix::new(rho)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rho[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rho
    }

    pub fn max_entry(&self) -> f64 {
        self.rho.iter().flatten().fold(0.0_f64, |m, &r| m.max(r))
    }

    /// Minimum off-diagonal entry; `None` for a single point.
    pub fn min_entry(&self) -> Option<f64> {
        (0..self.m)
            .flat_map(|i| (i + 1..self.m).map(move |j| (i, j)))
            .map(|(i, j)| self.rho[i][j])
            .reduce(f64::min)
    }

    /// Whether every triangle inequality holds within `tol` (relative to
    /// the largest entry).
    pub fn satisfies_triangle(&self, tol: f64) -> bool {
        let slack = tol * self.max_entry();
        (0..self.m).all(|i| {
            (0..self.m).all(|j| {
                (0..self.m).all(|k| self.rho[i][k] <= self.rho[i][j] + self.rho[j][k] + slack)
            })
        })
    }
}

/// Prefix sign certificate of a distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CmReport {
    /// Sign of CMdet(p_0..p_k) for k = 1..m−1, with near-zero values as 0.
    pub prefix_signs: Vec<i8>,
    pub embeddable: bool,
    pub witness_dim: Option<usize>,
}

/// Determinant of the bordered matrix [[ρ²_ij, 1], [1ᵀ, 0]] over `subset`.
pub fn cm_determinant(d: &DistanceMatrix, subset: &[usize]) -> Result<f64, CmError> {
    if subset.is_empty() {
        return Err(CmError::EmptySubset);
    }
    if subset.len() > MAX_POINTS {
        return Err(CmError::TooLarge(subset.len()));
    }
    let mut seen = vec![false; d.m];
    for &i in subset {
        if i >= d.m {
            return Err(CmError::Index(i));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(CmError::Duplicate(i));
        }
    }
    let k = subset.len();
    let mat = DMatrix::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
        (true, true) => d.rho[subset[r]][subset[c]].powi(2),
        (false, false) => 0.0,
        _ => 1.0,
    });
    Ok(mat.lu().determinant())
}

/// Computes the prefix signs of CMdet(p_0..p_k). A determinant is treated as
/// zero when |det| < tol·scale^{2k}, with scale the largest distance; the
/// determinant of k+1 points is homogeneous of degree 2k in the distances.
pub fn menger_check(d: &DistanceMatrix, tol: f64) -> Result<CmReport, CmError> {
    if d.m > MAX_POINTS {
        return Err(CmError::TooLarge(d.m));
    }
    let scale = d.max_entry();
    let mut prefix_signs = Vec::with_capacity(d.m.saturating_sub(1));
    for k in 1..d.m {
        let subset: Vec<usize> = (0..=k).collect();
        let det = cm_determinant(d, &subset)?;
        let threshold = tol * scale.powi(2 * k as i32);
        prefix_signs.push(if det.abs() < threshold {
            0
        } else if det > 0.0 {
            1
        } else {
            -1
        });
    }
    let embeddable = prefix_signs
        .iter()
        .enumerate()
        .all(|(i, &s)| s == if i % 2 == 0 { 1 } else { -1 });
    Ok(CmReport {
        witness_dim: embeddable.then(|| d.m - 1),
        prefix_signs,
        embeddable,
    })
}

pub(crate) enum LiftFailure {
    Singular,
}

/// One induction step of the embedding. `prev` holds points x_1..x_{k−1}
/// relative to x_0 = 0 in lower-triangular coordinates (x_i has support in
/// the first i coordinates and a nonzero i-th coordinate). Given the
/// distances ρ_0 = d(new, x_0) and rho[i−1] = d(new, x_i), solves
/// 2⟨x_i, v⟩ = ρ_0² + ‖x_i‖² − ρ_i² by forward substitution and returns v
/// together with the squared height ρ_0² − ‖v‖².
pub(crate) fn lift_point(
    prev: &[Vec<f64>],
    rho0: f64,
    rho: &[f64],
) -> Result<(Vec<f64>, f64), LiftFailure> {
    let k = prev.len();
    let mut v = vec![0.0; k];
    for i in 0..k {
        let xi = &prev[i];
        let sq: f64 = xi.iter().map(|c| c * c).sum();
        let rhs = 0.5 * (rho0 * rho0 + sq - rho[i] * rho[i]);
        let partial: f64 = (0..i).map(|j| xi[j] * v[j]).sum();
        let pivot = xi[i];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(LiftFailure::Singular);
        }
        v[i] = (rhs - partial) / pivot;
    }
    let height_sq = rho0 * rho0 - v.iter().map(|c| c * c).sum::<f64>();
    Ok((v, height_sq))
}

/// Constructs points in ℝ^{m−1} realising `d`: point 0 at the origin and
/// each new point placed in the positive half-space of a fresh coordinate.
pub fn embed_metric(d: &DistanceMatrix) -> Result<Vec<Vec<f64>>, CmError> {
    let m = d.m;
    if m > MAX_POINTS {
        return Err(CmError::TooLarge(m));
    }
    let dim = m.saturating_sub(1);
    let floor = 1e-14 * d.max_entry().powi(2);
    let mut tri: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for k in 1..m {
        let rho: Vec<f64> = (1..k).map(|i| d.rho[k][i]).collect();
        let (mut v, height_sq) =
            lift_point(&tri, d.rho[0][k], &rho).map_err(|_| CmError::Singular { step: k })?;
        if !(height_sq > floor) {
            return Err(CmError::NotEmbeddable {
                step: k,
                value: height_sq,
            });
        }
        v.push(height_sq.sqrt());
        tri.push(v);
    }
    let mut out = Vec::with_capacity(m);
    out.push(vec![0.0; dim]);
    for mut x in tri {
        x.resize(dim, 0.0);
        out.push(x);
    }
    Ok(out)
}

/// γ_n: √(1 + (2n+2)/(n²−2)) for even n, √(1 + 2/(n−1)) for odd n.
pub fn dekster_wilker_gamma(n: usize) -> Result<f64, CmError> {
    if n < 2 {
        return Err(CmError::Dimension(n));
    }
    let x = n as f64;
    Ok(if n % 2 == 0 {
        (1.0 + (2.0 * x + 2.0) / (x * x - 2.0)).sqrt()
    } else {
        (1.0 + 2.0 / (x - 1.0)).sqrt()
    })
}

/// Whether all distances of an (n+1)-point metric lie in [L, L(1+1/(n+1))],
/// L the smallest distance. Such metrics embed in ℓ_2^n as simplices.
pub fn almost_equilateral_check(d: &DistanceMatrix) -> bool {
    let Some(low) = d.min_entry() else {
        return true;
    };
    let n = (d.m - 1) as f64;
    let high = low * (1.0 + 1.0 / (n + 1.0));
    d.max_entry() <= high
}
