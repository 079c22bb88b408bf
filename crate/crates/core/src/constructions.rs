//! Explicit equilateral configurations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{greedy_sign_code, CodeError, MAX_CODE_DIM};
use crate::linalg::{dot, norm2};
use crate::norms::{smooth_norm_from_vertices, Exponent, NormError, NormSpec};

pub const MAX_HYPERCUBE_DIM: usize = 20;
pub const MAX_HADAMARD_LOG: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{what} = {value} exceeds the cap {limit}")]
    Cap {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("no sign change of the apex equation on [{0}, {1}]")]
    NotBracketed(f64, f64),
    #[error("matrix is not Hadamard: columns {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("code vectors {0} and {1} do not differ in exactly half the positions")]
    HammingMismatch(usize, usize),
    #[error("difference {0} is not separated from the other differences")]
    SupportFailure(usize),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

impl ConstructionError {
    pub fn is_numerical(&self) -> bool {
        match self {
            ConstructionError::NotBracketed(..) | ConstructionError::SupportFailure(_) => true,
            ConstructionError::Norm(e) => e.is_numerical(),
            _ => false,
        }
    }
}

/// A finite configuration in ℝ^n together with its norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSet {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub norm: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_distance: Option<f64>,
}

impl PointSet {
    /// Checks that every point lives in ℝ^n and that the norm agrees.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        if let Some(i) = self.points.iter().position(|p| p.len() != self.n) {
            return Err(ConstructionError::Argument(format!(
                "point {i} has {} coordinates, expected {}",
                self.points[i].len(),
                self.n
            )));
        }
        if self.points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(ConstructionError::Argument("non-finite coordinate".into()));
        }
        if let Some(d) = self.norm.dimension() {
            if d != self.n {
                return Err(ConstructionError::Argument(format!(
                    "norm lives in R^{d}, points in R^{}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The same configuration scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> PointSet {
        PointSet {
            n: self.n,
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|c| c * factor).collect())
                .collect(),
            norm: self.norm.clone(),
            claimed_distance: self.claimed_distance.map(|d| d * factor),
        }
    }
}

fn unit(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = s;
    v
}

/// {±e_i} in ℓ_1^n, 2-equilateral.
pub fn cross_polytope_set(n: usize) -> Result<PointSet, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::Argument("n must be at least 1".into()));
    }
    let points = (0..n)
        .flat_map(|i| [unit(n, i, 1.0), unit(n, i, -1.0)])
        .collect();
    Ok(PointSet {
        n,
        points,
        norm: NormSpec::lp_finite(1.0),
        claimed_distance: Some(2.0),
    })
}

/// All 2^n sign vectors in ℓ_∞^n, 2-equilateral.
pub fn hypercube_set(n: usize) -> Result<PointSet, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::Argument("n must be at least 1".into()));
    }
    if n > MAX_HYPERCUBE_DIM {
        return Err(ConstructionError::Cap {
            what: "n",
            value: n,
            limit: MAX_HYPERCUBE_DIM,
        });
    }
    let points = (0..1u32 << n)
        .map(|u| {
            (0..n)
                .map(|k| if (u >> (n - 1 - k)) & 1 == 1 { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();
    Ok(PointSet {
        n,
        points,
        norm: NormSpec::l_inf(),
        claimed_distance: Some(2.0),
    })
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, ConstructionError> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(ConstructionError::NotBracketed(lo, hi));
    }
    let lo_sign = flo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of |1−λ|^p + (n−1)|λ|^p = 2: the negative root in [−2, 0] and the
/// positive root in [0, 2].
pub fn apex_roots(n: usize, p: f64) -> Result<(f64, f64), ConstructionError> {
    if n < 2 || !(p > 1.0 && p.is_finite()) {
        return Err(ConstructionError::Argument(format!(
            "simplex with apex needs n >= 2 and 1 < p < inf (n = {n}, p = {p})"
        )));
    }
    let g = |l: f64| (1.0 - l).abs().powf(p) + (n as f64 - 1.0) * l.abs().powf(p) - 2.0;
    Ok((bisect(g, -2.0, 0.0, 1e-13)?, bisect(g, 0.0, 2.0, 1e-13)?))
}

/// {e_1,…,e_n, λ·Σe_i} in ℓ_p^n, 2^{1/p}-equilateral. The negative root λ
/// is used unless `positive_root` is set.
pub fn simplex_with_apex(n: usize, p: f64, positive_root: bool) -> Result<PointSet, ConstructionError> {
    let (neg, pos) = apex_roots(n, p)?;
    let lambda = if positive_root { pos } else { neg };
    let mut points: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i, 1.0)).collect();
    points.push(vec![lambda; n]);
    Ok(PointSet {
        n,
        points,
        norm: NormSpec::lp_finite(p),
        claimed_distance: Some(2f64.powf(1.0 / p)),
    })
}

/// A ±1 matrix with pairwise orthogonal columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHadamard")]
pub struct HadamardMatrix {
    order: usize,
    entries: Vec<Vec<i8>>,
}

#[derive(Deserialize)]
struct RawHadamard {
    order: usize,
    entries: Vec<Vec<i8>>,
}

impl TryFrom<RawHadamard> for HadamardMatrix {
    type Error = ConstructionError;

    fn try_from(raw: RawHadamard) -> Result<Self, ConstructionError> {
        if raw.order != raw.entries.len() {
            return Err(ConstructionError::Argument("order does not match entries".into()));
        }
        HadamardMatrix::new(raw.entries)
    }
}

impl HadamardMatrix {
    /// Validates entries and column orthogonality in exact arithmetic.
    pub fn new(entries: Vec<Vec<i8>>) -> Result<Self, ConstructionError> {
        let order = entries.len();
        if order == 0 {
            return Err(ConstructionError::Argument("empty matrix".into()));
        }
        if entries
            .iter()
            .any(|r| r.len() != order || r.iter().any(|&e| e != 1 && e != -1))
        {
            return Err(ConstructionError::Argument("entries must be a square ±1 array".into()));
        }
        for a in 0..order {
            for b in a + 1..order {
                let s: i64 = (0..order)
                    .map(|r| entries[r][a] as i64 * entries[r][b] as i64)
                    .sum();
                if s != 0 {
                    return Err(ConstructionError::NotOrthogonal(a, b));
                }
            }
        }
        Ok(HadamardMatrix { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[Vec<i8>] {
        &self.entries
    }
}

/// Sylvester's doubling H_{j+1} = [[H_j, H_j], [H_j, −H_j]] from H_0 = [1].
pub fn sylvester_hadamard(k: u32) -> Result<HadamardMatrix, ConstructionError> {
    if k > MAX_HADAMARD_LOG {
        return Err(ConstructionError::Cap {
            what: "k",
            value: k as usize,
            limit: MAX_HADAMARD_LOG as usize,
        });
    }
    let order = 1usize << k;
    // Entry (r, c) of the Sylvester matrix is (−1)^{popcount(r & c)}.
    let entries = (0..order)
        .map(|r| {
            (0..order)
                .map(|c| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect();
    Ok(HadamardMatrix { order, entries })
}

fn pack(signs: &[i8]) -> Vec<u64> {
    let mut words = vec![0u64; signs.len().div_ceil(64)];
    for (i, &s) in signs.iter().enumerate() {
        if s < 0 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

fn hamming(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Normalises columns so row 0 is all ones, then drops row 0. The resulting
/// columns are `order` sign vectors in ℝ^{order−1}, any two differing in
/// exactly order/2 positions.
pub fn hadamard_code_vectors(h: &HadamardMatrix) -> Result<Vec<Vec<i8>>, ConstructionError> {
    let order = h.order;
    if order < 2 {
        return Err(ConstructionError::Argument("order must be at least 2".into()));
    }
    let vectors: Vec<Vec<i8>> = (0..order)
        .map(|c| {
            let s = h.entries[0][c];
            (1..order).map(|r| h.entries[r][c] * s).collect()
        })
        .collect();
    let packed: Vec<Vec<u64>> = vectors.iter().map(|v| pack(v)).collect();
    for a in 0..order {
        for b in a + 1..order {
            if hamming(&packed[a], &packed[b]) as usize != order / 2 {
                return Err(ConstructionError::HammingMismatch(a, b));
            }
        }
    }
    Ok(vectors)
}

/// Two copies of the Hadamard code of order n = 2^k, one in the first n−1
/// and one in the last n−1 coordinates of ℝ^{2n−2}. Returns the set and the
/// exponent p = 2 + log2((n−1)/n) at which it is equilateral in ℓ_p.
pub fn two_block_set(k: u32) -> Result<(PointSet, f64), ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::Argument("two-block set needs k >= 2".into()));
    }
    let vectors = hadamard_code_vectors(&sylvester_hadamard(k)?)?;
    let n = 1usize << k;
    let dim = 2 * n - 2;
    let mut points = Vec::with_capacity(2 * n);
    for offset in [0, n - 1] {
        for v in &vectors {
            let mut x = vec![0.0; dim];
            for (i, &s) in v.iter().enumerate() {
                x[offset + i] = s as f64;
            }
            points.push(x);
        }
    }
    let p = 2.0 + ((n as f64 - 1.0) / n as f64).log2();
    Ok((
        PointSet {
            n: dim,
            points,
            norm: NormSpec::lp(Exponent::Finite(p))?,
            claimed_distance: Some((dim as f64).powf(1.0 / p)),
        },
        p,
    ))
}

/// Vertex representatives of the difference body of a sign code: the
/// integer vectors s_i − s_j up to sign, with the first nonzero entry made
/// positive.
fn sign_differences(signs: &[Vec<i8>]) -> Vec<Vec<i32>> {
    let mut out: Vec<Vec<i32>> = Vec::new();
    for i in 0..signs.len() {
        for j in i + 1..signs.len() {
            let mut d: Vec<i32> = signs[i]
                .iter()
                .zip(&signs[j])
                .map(|(&a, &b)| a as i32 - b as i32)
                .collect();
            if d.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
                d.iter_mut().for_each(|c| *c = -*c);
            }
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

/// Orthonormal vectors completing the span of `rows` to all of ℝ^n.
fn orthogonal_complement(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let reduce = |v: &[f64], basis: &mut Vec<Vec<f64>>| -> bool {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(&r, b);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = norm2(&r);
        if len > 1e-8 * norm2(v).max(1.0) {
            basis.push(r.into_iter().map(|x| x / len).collect());
            true
        } else {
            false
        }
    };
    for r in rows {
        reduce(r, &mut basis);
    }
    let mut extra = Vec::new();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        if reduce(&unit(n, i, 1.0), &mut basis) {
            extra.push(basis.last().expect("just pushed").clone());
        }
    }
    extra
}

/// The FLM construction: a greedy almost-orthogonal code {w_i}, the
/// polytope spanned by its differences, and a smooth strictly convex norm
/// whose unit sphere passes through every difference, so that {w_i} is
/// 1-equilateral.
///
/// When the differences do not span ℝ^n, an orthonormal basis of their
/// orthogonal complement is added to the vertex set. This leaves the norm
/// of every difference at 1 and makes the result a norm on all of ℝ^n.
pub fn flm_set(n: usize, delta: f64, p_start: u32) -> Result<(NormSpec, PointSet), ConstructionError> {
    if n > MAX_CODE_DIM {
        return Err(ConstructionError::Cap {
            what: "n",
            value: n,
            limit: MAX_CODE_DIM,
        });
    }
    let family = greedy_sign_code(n, delta)?;
    if family.len() < 2 {
        return Err(ConstructionError::Argument(format!(
            "the code for n = {n}, delta = {delta} has a single vector"
        )));
    }
    let diffs = sign_differences(&family.signs);
    // Supporting hyperplane condition: the functional D/⟨D,D⟩ separates D
    // from every other difference, |⟨D',D⟩| < ⟨D,D⟩. Exact in integers.
    for (a, da) in diffs.iter().enumerate() {
        let self_ip: i64 = da.iter().map(|&c| (c * c) as i64).sum();
        let separated = diffs.iter().enumerate().all(|(b, db)| {
            b == a || da.iter().zip(db).map(|(&x, &y)| (x * y) as i64).sum::<i64>().abs() < self_ip
        });
        if !separated {
            return Err(ConstructionError::SupportFailure(a));
        }
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut reps: Vec<Vec<f64>> = diffs
        .iter()
        .map(|d| d.iter().map(|&c| c as f64 * scale).collect())
        .collect();
    let complement = orthogonal_complement(&reps, n);
    reps.extend(complement);
    let norm = smooth_norm_from_vertices(&reps, p_start)?;
    let points = family.vectors();
    Ok((
        norm.clone(),
        PointSet {
            n,
            points,
            norm,
            claimed_distance: Some(1.0),
        },
    ))
}

/// The cone norm |x_1| + ‖(x_2,…,x_n)‖_2 with the 4-point set {±e_1, ±e_2}.
pub fn petty_cone_example(n: usize) -> Result<(NormSpec, PointSet), ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::Argument("the cone example needs n >= 3".into()));
    }
    let norm = NormSpec::cone_l1_euclid(n)?;
    let points = vec![unit(n, 0, 1.0), unit(n, 0, -1.0), unit(n, 1, 1.0), unit(n, 1, -1.0)];
    Ok((
        norm.clone(),
        PointSet {
            n,
            points,
            norm,
            claimed_distance: Some(2.0),
        },
    ))
}
