//! Norm families and synthesis of smooth strictly convex norms through
//! prescribed boundary points.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{dot, rows_rank};
use crate::lp::{self, GaugeOutcome};

/// Relative tolerance used when matching a vertex with its negation.
const SYMMETRY_TOL: f64 = 1e-12;
/// Required margin for strict separation by a supporting functional.
pub const SEPARATION_MARGIN: f64 = 1e-9;
/// Exponents above this are not attempted by the escalation rule.
pub const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("dimension mismatch: norm lives in R^{expected}, vector has {got} entries")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid exponent {0}")]
    InvalidExponent(String),
    #[error("polytope vertex {0} has no antipodal partner")]
    NotSymmetric(usize),
    #[error("polytope vertices do not span R^{0}; the gauge is infinite off their span")]
    NotSpanning(usize),
    #[error("invalid norm description: {0}")]
    Invalid(String),
    #[error("point {0} is not a vertex: it lies in the hull of the other vertices")]
    NotAVertex(usize),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("no even exponent up to {MAX_EXPONENT} makes the off-diagonal terms small enough")]
    EscalationExhausted,
    #[error("weight {index} came out nonpositive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("representative {index} has norm {value} under the synthesised norm")]
    NotOnBoundary { index: usize, value: f64 },
}

impl NormError {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            NormError::Lp(_)
                | NormError::EscalationExhausted
                | NormError::NonPositiveWeight { .. }
                | NormError::NotOnBoundary { .. }
        )
    }
}

/// The exponent of an ℓ_p norm. Infinity is its own variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent::Finite(p)),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(Exponent::Infinity)
            }
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", found \"{s}\""
            ))),
        }
    }
}

/// A norm on ℝ^n.
///
/// Construct through the checked constructors or by deserialising; both
/// enforce the invariants of each family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSpec")]
pub enum NormSpec {
    Lp {
        p: Exponent,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    PowerSum {
        functionals: Vec<Vec<f64>>,
        weights: Vec<f64>,
        exponent: u32,
    },
    ConeL1Euclid {
        n: usize,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawSpec {
    Lp {
        p: Exponent,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    PowerSum {
        functionals: Vec<Vec<f64>>,
        weights: Vec<f64>,
        exponent: u32,
    },
    ConeL1Euclid {
        n: usize,
    },
}

impl TryFrom<RawSpec> for NormSpec {
    type Error = NormError;

    fn try_from(raw: RawSpec) -> Result<Self, NormError> {
        match raw {
            RawSpec::Lp { p } => NormSpec::lp(p),
            RawSpec::Polytope { vertices } => NormSpec::polytope(vertices),
            RawSpec::PowerSum {
                functionals,
                weights,
                exponent,
            } => NormSpec::power_sum(functionals, weights, exponent),
            RawSpec::ConeL1Euclid { n } => NormSpec::cone_l1_euclid(n),
        }
    }
}

fn all_finite(rows: &[Vec<f64>]) -> bool {
    rows.iter().flatten().all(|c| c.is_finite())
}

fn uniform_dim(rows: &[Vec<f64>], what: &str) -> Result<usize, NormError> {
    let n = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| NormError::Invalid(format!("{what} list is empty")))?;
    if n == 0 {
        return Err(NormError::Invalid(format!("{what} have dimension 0")));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(NormError::Invalid(format!(
            "{what} {bad} has {} entries, expected {n}",
            rows[bad].len()
        )));
    }
    if !all_finite(rows) {
        return Err(NormError::Invalid(format!("{what} contain non-finite entries")));
    }
    Ok(n)
}

impl NormSpec {
    pub fn lp(p: Exponent) -> Result<Self, NormError> {
        if let Exponent::Finite(v) = p {
            if !(v.is_finite() && v >= 1.0) {
                return Err(NormError::InvalidExponent(format!("p = {v}, need p >= 1")));
            }
        }
        Ok(NormSpec::Lp { p })
    }

    /// ℓ_p with finite p; panics on p < 1. Convenience for fixed parameters.
    pub fn lp_finite(p: f64) -> Self {
        NormSpec::lp(Exponent::Finite(p)).expect("p >= 1")
    }

    pub fn l_inf() -> Self {
        NormSpec::Lp {
            p: Exponent::Infinity,
        }
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self, NormError> {
        let n = uniform_dim(&vertices, "vertices")?;
        for (i, v) in vertices.iter().enumerate() {
            let scale = v.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
            let has_partner = vertices.iter().any(|w| {
                w.iter()
                    .zip(v)
                    .all(|(a, b)| (a + b).abs() <= SYMMETRY_TOL * scale)
            });
            if !has_partner {
                return Err(NormError::NotSymmetric(i));
            }
        }
        if rows_rank(&vertices, 1e-12) < n {
            return Err(NormError::NotSpanning(n));
        }
        Ok(NormSpec::Polytope { vertices })
    }

    pub fn power_sum(
        functionals: Vec<Vec<f64>>,
        weights: Vec<f64>,
        exponent: u32,
    ) -> Result<Self, NormError> {
        uniform_dim(&functionals, "functionals")?;
        if weights.len() != functionals.len() {
            return Err(NormError::Invalid(format!(
                "{} weights for {} functionals",
                weights.len(),
                functionals.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(NormError::Invalid(format!("weight {i} is not positive")));
        }
        if exponent < 2 || exponent % 2 != 0 {
            return Err(NormError::InvalidExponent(format!(
                "power-sum exponent {exponent} must be even and >= 2"
            )));
        }
        Ok(NormSpec::PowerSum {
            functionals,
            weights,
            exponent,
        })
    }

    pub fn cone_l1_euclid(n: usize) -> Result<Self, NormError> {
        if n == 0 {
            return Err(NormError::Invalid("cone norm needs n >= 1".into()));
        }
        Ok(NormSpec::ConeL1Euclid { n })
    }

    /// The dimension the norm is tied to, or `None` for ℓ_p (any dimension).
    pub fn dimension(&self) -> Option<usize> {
        match self {
            NormSpec::Lp { .. } => None,
            NormSpec::Polytope { vertices } => Some(vertices[0].len()),
            NormSpec::PowerSum { functionals, .. } => Some(functionals[0].len()),
            NormSpec::ConeL1Euclid { n } => Some(*n),
        }
    }

    /// Evaluates the norm; see [`norm_eval`].
    pub fn eval(&self, x: &[f64]) -> Result<f64, NormError> {
        norm_eval(self, x)
    }

    /// Distance between two points.
    pub fn dist(&self, a: &[f64], b: &[f64]) -> Result<f64, NormError> {
        if a.len() != b.len() {
            return Err(NormError::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm_eval(self, &d)
    }
}

pub(crate) fn lp_value(p: Exponent, x: &[f64]) -> f64 {
    let max = x.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    match p {
        Exponent::Infinity => max,
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|c| c.abs()).sum(),
        Exponent::Finite(p) if p == 2.0 => {
            if max == 0.0 {
                return 0.0;
            }
            max * x.iter().map(|c| (c / max).powi(2)).sum::<f64>().sqrt()
        }
        Exponent::Finite(p) => {
            if max == 0.0 {
                return 0.0;
            }
            max * x.iter().map(|c| (c.abs() / max).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

fn power_sum_value(functionals: &[Vec<f64>], weights: &[f64], p: u32, x: &[f64]) -> f64 {
    let inv = 1.0 / p as f64;
    let terms: Vec<f64> = functionals
        .iter()
        .zip(weights)
        .map(|(y, &w)| w.powf(inv) * dot(y, x).abs())
        .collect();
    let max = terms.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let p = p as i32;
    max * terms.iter().map(|t| (t / max).powi(p)).sum::<f64>().powf(inv)
}

/// Evaluates `spec` at `x`.
pub fn norm_eval(spec: &NormSpec, x: &[f64]) -> Result<f64, NormError> {
    if let Some(n) = spec.dimension() {
        if x.len() != n {
            return Err(NormError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
    }
    match spec {
        NormSpec::Lp { p } => Ok(lp_value(*p, x)),
        NormSpec::Polytope { vertices } => match lp::gauge(vertices, x) {
            GaugeOutcome::Value(v) => Ok(v),
            GaugeOutcome::Unreachable => Err(NormError::NotSpanning(x.len())),
            GaugeOutcome::Failed(msg) => Err(NormError::Lp(msg)),
        },
        NormSpec::PowerSum {
            functionals,
            weights,
            exponent,
        } => Ok(power_sum_value(functionals, weights, *exponent, x)),
        NormSpec::ConeL1Euclid { .. } => {
            Ok(x[0].abs() + lp_value(Exponent::Finite(2.0), &x[1..]))
        }
    }
}

/// For representatives x_1..x_m of a centrally symmetric polytope
/// {±x_1,…,±x_m}, finds y_i with ⟨y_i,x_i⟩ = 1 and |⟨y_i,x_j⟩| < 1 for j ≠ i.
///
/// Each y_i maximises the separation margin, which is required to be at
/// least [`SEPARATION_MARGIN`].
pub fn supporting_functionals(representatives: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, NormError> {
    uniform_dim(representatives, "representatives")?;
    let mut out = Vec::with_capacity(representatives.len());
    for (i, x) in representatives.iter().enumerate() {
        let others: Vec<&[f64]> = representatives
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.as_slice())
            .collect();
        match lp::separating_functional(x, &others).map_err(NormError::Lp)? {
            Some((y, margin)) if margin >= SEPARATION_MARGIN => out.push(y),
            _ => return Err(NormError::NotAVertex(i)),
        }
    }
    Ok(out)
}

/// Builds a smooth strictly convex norm ‖x‖ = (Σ λ_j |⟨y_j,x⟩|^p)^{1/p}
/// whose unit sphere passes through every ±x_i.
///
/// Starting from `p`, the exponent is raised in steps of 2 until every
/// off-diagonal |⟨y_j,x_i⟩|^p is below 1/(2m). The weights solve
/// (I + A)λ = 1 with a_ij = |⟨y_j,x_i⟩|^p off the diagonal.
pub fn smooth_norm_from_vertices(representatives: &[Vec<f64>], p: u32) -> Result<NormSpec, NormError> {
    if p < 2 || p % 2 != 0 {
        return Err(NormError::InvalidExponent(format!(
            "starting exponent {p} must be even and >= 2"
        )));
    }
    let ys = supporting_functionals(representatives)?;
    let m = representatives.len();
    let gram: Vec<Vec<f64>> = representatives
        .iter()
        .map(|x| ys.iter().map(|y| dot(y, x).abs()).collect())
        .collect();
    let worst = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| gram[i][j])
        .fold(0.0_f64, f64::max);

    let limit = 1.0 / (2.0 * m as f64);
    let mut exponent = p;
    while worst.powf(exponent as f64) >= limit {
        exponent += 2;
        if exponent > MAX_EXPONENT {
            return Err(NormError::EscalationExhausted);
        }
    }

    let e = exponent as i32;
    let system = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { gram[i][j].powi(e) });
    let weights = system
        .lu()
        .solve(&DVector::from_element(m, 1.0))
        .ok_or_else(|| NormError::Lp("weight system is singular".into()))?;
    if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
        return Err(NormError::NonPositiveWeight { index, value });
    }

    let spec = NormSpec::PowerSum {
        functionals: ys,
        weights: weights.iter().copied().collect(),
        exponent,
    };
    for (index, x) in representatives.iter().enumerate() {
        let value = norm_eval(&spec, x)?;
        if (value - 1.0).abs() > 1e-10 {
            return Err(NormError::NotOnBoundary { index, value });
        }
    }
    Ok(spec)
}
