//! Greedy almost-orthogonal families of scaled sign vectors.
//!
//! Sign vectors w, w' ∈ {−1,1}^n at Hamming distance d have
//! ⟨w,w'⟩/n = (n−2d)/n. Joining the pairs with |(n−2d)/n| ≥ δ gives a regular
//! graph; any independent set is a family with all |⟨w_i,w_j⟩| < δ after
//! scaling by n^{−1/2}.

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest dimension for which the 2^n vertices are enumerated.
pub const MAX_CODE_DIM: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("argument {0} is outside [0, 1]")]
    EntropyDomain(f64),
    #[error("dimension {0} exceeds the enumeration cap {MAX_CODE_DIM}")]
    TooLarge(usize),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("delta = {0} must lie in (0, 1]")]
    Delta(f64),
}

/// H(x) = −x log2 x − (1−x) log2 (1−x), with H(0) = H(1) = 0.
pub fn binary_entropy(x: f64) -> Result<f64, CodeError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(CodeError::EntropyDomain(x));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

fn check_args(n: usize, delta: f64) -> Result<(), CodeError> {
    if n == 0 {
        return Err(CodeError::ZeroDimension);
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(CodeError::Delta(delta));
    }
    Ok(())
}

/// Upper bound −1 + 2^{nH((1−δ)/2)+1} on the degree of the code graph.
pub fn chernoff_degree_bound(n: usize, delta: f64) -> Result<f64, CodeError> {
    check_args(n, delta)?;
    let h = binary_entropy((1.0 - delta) / 2.0)?;
    Ok(-1.0 + (n as f64 * h + 1.0).exp2())
}

/// Whether sign vectors at Hamming distance `d` are joined in the graph.
pub fn joined(n: usize, delta: f64, d: usize) -> bool {
    let ip = (n as f64 - 2.0 * d as f64) / n as f64;
    ip.abs() >= delta
}

/// Exact degree of the (vertex-transitive) code graph, excluding the vertex
/// itself.
pub fn exact_degree(n: usize, delta: f64) -> Result<u64, CodeError> {
    check_args(n, delta)?;
    let mut binom = 1u64;
    let mut total = 0u64;
    for d in 0..=n {
        if d > 0 {
            binom = binom * (n as u64 - d as u64 + 1) / d as u64;
            if joined(n, delta, d) {
                total += binom;
            }
        }
    }
    Ok(total)
}

/// Size guaranteed by the counting argument, 2^{n(1−H((1−δ)/2))−1}.
pub fn guaranteed_size(n: usize, delta: f64) -> Result<f64, CodeError> {
    check_args(n, delta)?;
    let h = binary_entropy((1.0 - delta) / 2.0)?;
    Ok((n as f64 * (1.0 - h) - 1.0).exp2())
}

/// The growth rate ε = δ²/2 for which the family exceeds (1+ε)^n once
/// n ≥ n_0, together with n_0 = 120 ln 2 / (25δ⁴ − δ⁶).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRate {
    pub epsilon: f64,
    pub n0: f64,
}

pub fn growth_rate(delta: f64) -> GrowthRate {
    GrowthRate {
        epsilon: delta * delta / 2.0,
        n0: 120.0 * std::f64::consts::LN_2 / (25.0 * delta.powi(4) - delta.powi(6)),
    }
}

/// A family of unit vectors ±n^{−1/2} with pairwise |⟨w_i,w_j⟩| < δ.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostOrthogonalFamily {
    pub n: usize,
    pub delta: f64,
    /// Sign patterns; the unit vectors are these divided by √n.
    pub signs: Vec<Vec<i8>>,
    pub max_offdiag: f64,
    pub guaranteed_size: f64,
}

impl AlmostOrthogonalFamily {
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// The scaled unit vectors.
    pub fn vectors(&self) -> Vec<Vec<f64>> {
        let s = 1.0 / (self.n as f64).sqrt();
        self.signs
            .iter()
            .map(|w| w.iter().map(|&c| c as f64 * s).collect())
            .collect()
    }
}

impl Serialize for AlmostOrthogonalFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AlmostOrthogonalFamily", 5)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("delta", &self.delta)?;
        st.serialize_field("vectors", &self.signs)?;
        st.serialize_field("max_offdiag", &self.max_offdiag)?;
        st.serialize_field("guaranteed_size", &self.guaranteed_size)?;
        st.end()
    }
}

/// Sign pattern of the vertex with index `u` in lexicographic order
/// (−1 before +1, first coordinate most significant).
fn signs_of(u: u32, n: usize) -> Vec<i8> {
    (0..n)
        .map(|k| if (u >> (n - 1 - k)) & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// Greedy independent set in the code graph on {−1,1}^n, visiting vertices
/// in lexicographic order.
pub fn greedy_sign_code(n: usize, delta: f64) -> Result<AlmostOrthogonalFamily, CodeError> {
    check_args(n, delta)?;
    if n > MAX_CODE_DIM {
        return Err(CodeError::TooLarge(n));
    }
    let is_joined: Vec<bool> = (0..=n).map(|d| joined(n, delta, d)).collect();
    let mut chosen: Vec<u32> = Vec::new();
    for u in 0..(1u32 << n) {
        if chosen
            .iter()
            .all(|&c| !is_joined[(c ^ u).count_ones() as usize])
        {
            chosen.push(u);
        }
    }
    let mut max_offdiag = 0.0_f64;
    for (a, &ca) in chosen.iter().enumerate() {
        for &cb in &chosen[a + 1..] {
            let d = (ca ^ cb).count_ones() as f64;
            max_offdiag = max_offdiag.max(((n as f64 - 2.0 * d) / n as f64).abs());
        }
    }
    Ok(AlmostOrthogonalFamily {
        n,
        delta,
        signs: chosen.into_iter().map(|u| signs_of(u, n)).collect(),
        max_offdiag,
        guaranteed_size: guaranteed_size(n, delta)?,
    })
}
