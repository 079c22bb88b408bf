use serde::{Deserialize, Serialize};

use super::LabError;
use crate::norms::Exponent;

/// The space families the ledger knows about.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NormFamily {
    Lp { p: Exponent },
    StrictlyConvex,
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub value: u64,
    pub provenance: String,
}

/// Certified bounds on e(X), the largest size of an equilateral set in X.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub family: NormFamily,
    pub lower_bounds: Vec<Bound>,
    pub upper_bounds: Vec<Bound>,
    pub exact: Option<u64>,
    /// Asymptotic results whose constants are not specified.
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn best_lower(&self) -> u64 {
        self.lower_bounds.iter().map(|b| b.value).max().unwrap_or(0)
    }

    pub fn best_upper(&self) -> u64 {
        self.upper_bounds.iter().map(|b| b.value).min().unwrap_or(u64::MAX)
    }

    /// Every lower bound is at most every upper bound, and the exact value
    /// (if any) lies between them.
    pub fn is_consistent(&self) -> bool {
        let (lo, hi) = (self.best_lower(), self.best_upper());
        lo <= hi && self.exact.is_none_or(|e| lo <= e && e <= hi)
    }
}

fn bound(value: u64, provenance: impl Into<String>) -> Bound {
    Bound {
        value,
        provenance: provenance.into(),
    }
}

fn even_integer(p: f64) -> Option<u64> {
    (p.fract() == 0.0 && p >= 2.0 && (p as u64) % 2 == 0).then_some(p as u64)
}

/// The two-block Hadamard family bound ⌊2^{k+1}/(2^{k+1}−1)·n⌋ for 1 < p < 2,
/// with k = ⌈log2(1/(1−2^{p−2}))⌉ − 1.
pub(crate) fn hadamard_block_bound(n: usize, p: f64) -> u64 {
    let r = (1.0 / (1.0 - (p - 2.0).exp2())).log2();
    // At the endpoints p = 2 + log2(1 − 2^{−j}) the logarithm is an integer
    // that rounding may push just above; snap it back.
    let r = if (r - r.round()).abs() < 1e-9 { r.round() } else { r };
    let k = r.ceil() - 1.0;
    let q = (k + 1.0).exp2();
    (q / (q - 1.0) * n as f64).floor() as u64
}

/// Assembles the known bounds for e(X) with X of dimension `n` in `family`.
pub fn known_bounds(n: usize, family: NormFamily) -> Result<BoundReport, LabError> {
    if n == 0 || n > 63 {
        return Err(LabError::Argument(format!("n = {n} must lie in 1..=63")));
    }
    let nn = n as u64;
    let pow = 1u64 << n;
    let mut lower = Vec::new();
    let mut upper = vec![bound(pow, "Petty: e(X) <= 2^n in every n-dimensional space")];
    let mut notes = Vec::new();
    let mut exact = None;

    if n == 1 {
        lower.push(bound(2, "any two points are equilateral"));
        upper.push(bound(2, "a line contains at most two equidistant points"));
    }

    match family {
        NormFamily::Lp { p: Exponent::Infinity } => {
            lower.push(bound(pow, "hypercube {±1}^n is 2-equilateral in l_inf"));
            exact = Some(pow);
        }
        NormFamily::Lp { p: Exponent::Finite(p) } => {
            if !(p.is_finite() && p >= 1.0) {
                return Err(LabError::Argument(format!("invalid exponent p = {p}")));
            }
            if p == 1.0 {
                lower.push(bound(2 * nn, "cross-polytope {±e_i} is 2-equilateral in l_1"));
                notes.push("Alon-Pudlak: e(l_1^n) <= c n log n, c unspecified".into());
                match n {
                    3 => exact = Some(6),
                    4 => exact = Some(8),
                    _ => {}
                }
                if n == 3 {
                    upper.push(bound(6, "Bandelt et al.: e(l_1^3) = 6"));
                }
                if n == 4 {
                    upper.push(bound(8, "Koolen et al.: e(l_1^4) = 8"));
                }
            } else {
                lower.push(bound(nn + 1, "simplex {e_1,...,e_n, lambda sum e_i} in l_p"));
                if n >= 2 {
                    upper.push(bound(pow - 1, "Petty: e(X) <= 2^n - 1 for strictly convex X"));
                }
                notes.push(
                    "Smyth: e(l_p^n) < c_p n^((p+1)/(p-1)), c_p unspecified".into(),
                );
                notes.push(
                    "Alon-Pudlak: e(l_p^n) < c_p n^((2p+2)/(2p-1)), c_p unspecified".into(),
                );
                notes.push(
                    "Smyth: e(l_p^n) = n + 1 when |p - 2| < 4(1+o(1))/(n log n), o(1) unspecified"
                        .into(),
                );
                if p < 2.0 {
                    lower.push(bound(
                        hadamard_block_bound(n, p),
                        "Hadamard block construction: floor(2^(k+1)/(2^(k+1)-1) n)",
                    ));
                    notes.push(
                        "e(l_p^n) > n + 1 when p < 2 - (1+o(1))/(n log 2), o(1) unspecified"
                            .into(),
                    );
                }
                if p.fract() == 0.0 && (p as u64) % 2 == 1 {
                    notes.push("Alon-Pudlak: e(l_p^n) <= c_p n log n for odd p".into());
                }
                if let Some(q) = even_integer(p) {
                    upper.push(bound(1 + (q - 1) * nn, "Galvin: e(l_p^n) <= 1 + (p-1)n, p even"));
                    let v = if q % 4 == 0 { (q / 2 - 1) * nn + 1 } else { (q / 2) * nn + 1 };
                    upper.push(bound(
                        v,
                        "linear independence of power functions: (p/2-1)n+1 if 4 | p, else (p/2)n+1",
                    ));
                }
                if p == 2.0 || p == 4.0 {
                    exact = Some(nn + 1);
                }
                if n == 2 {
                    exact = Some(3);
                }
            }
        }
        NormFamily::StrictlyConvex => {
            general_lower(n, &mut lower);
            if n >= 2 {
                upper.push(bound(pow - 1, "Petty: e(X) <= 2^n - 1 for strictly convex X"));
            }
            if n == 2 {
                exact = Some(3);
            }
            notes.push("Brass-Dekster: e(X) >= c (log n)^(1/3), c unspecified".into());
        }
        NormFamily::General => {
            general_lower(n, &mut lower);
            notes.push("Brass-Dekster: e(X) >= c (log n)^(1/3), c unspecified".into());
        }
    }

    let report = BoundReport {
        n,
        family,
        lower_bounds: lower,
        upper_bounds: upper,
        exact,
        notes,
    };
    let (lo, hi) = (report.best_lower(), report.best_upper());
    let exact = report.exact.or((lo == hi).then_some(lo));
    Ok(BoundReport { exact, ..report })
}

fn general_lower(n: usize, lower: &mut Vec<Bound>) {
    if n >= 2 {
        lower.push(bound(3, "every plane contains an equilateral triangle"));
    }
    if n >= 3 {
        lower.push(bound(4, "Petty: e(X) >= 4 for n >= 3"));
    }
}
