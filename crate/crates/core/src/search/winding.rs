use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::SearchError;
use crate::linalg::{dot, norm2};
use crate::norms::NormSpec;

pub const DEFAULT_PLANE_SAMPLES: usize = 4096;
pub const MAX_PLANE_SAMPLES: usize = 1 << 16;
const ON_CURVE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindingReport {
    /// Winding number of f(S_2) about (1, 1); 0 when `on_curve`.
    pub winding: i64,
    pub on_curve: bool,
    /// Number of samples actually used after refinement.
    pub samples: usize,
}

/// Winding number of the closed polygon through `curve` about `center`,
/// together with the largest absolute angle increment.
fn winding_with_max_step(curve: &[[f64; 2]], center: [f64; 2]) -> (i64, f64) {
    let m = curve.len();
    let mut total = 0.0;
    let mut largest = 0.0_f64;
    for k in 0..m {
        let a = curve[k];
        let b = curve[(k + 1) % m];
        let ta = (a[1] - center[1]).atan2(a[0] - center[0]);
        let tb = (b[1] - center[1]).atan2(b[0] - center[0]);
        let mut d = tb - ta;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        total += d;
        largest = largest.max(d.abs());
    }
    ((total / (2.0 * PI)).round() as i64, largest)
}

/// Winding number of a closed polygon about `center`.
pub fn winding_number(curve: &[[f64; 2]], center: [f64; 2]) -> i64 {
    if curve.is_empty() {
        return 0;
    }
    winding_with_max_step(curve, center).0
}

/// Traces f(x) = (‖x − b‖, ‖x − c‖) over the unit circle of span{b, c} and
/// reports how often it winds around (1, 1).
pub fn winding_certificate(
    norm: &NormSpec,
    b: &[f64],
    c: &[f64],
    plane_samples: usize,
) -> Result<WindingReport, SearchError> {
    if b.len() != c.len() || b.is_empty() {
        return Err(SearchError::Argument("b and c must be vectors of one dimension".into()));
    }
    if let Some(d) = norm.dimension() {
        if d != b.len() {
            return Err(SearchError::Argument(format!(
                "norm lives in R^{d}, vectors in R^{}",
                b.len()
            )));
        }
    }
    if plane_samples < 8 {
        return Err(SearchError::Argument(format!("{plane_samples} samples is too few")));
    }
    for (label, v) in [("b", norm.eval(b)?), ("c", norm.eval(c)?), ("b - c", norm.dist(b, c)?)] {
        if (v - 1.0).abs() > 1e-9 {
            return Err(SearchError::Argument(format!("||{label}|| = {v}, expected 1")));
        }
    }
    let e1: Vec<f64> = b.iter().map(|x| x / norm2(b)).collect();
    let proj = dot(c, &e1);
    let r: Vec<f64> = c.iter().zip(&e1).map(|(x, y)| x - proj * y).collect();
    let rn = norm2(&r);
    if rn <= 1e-12 * norm2(c) {
        return Err(SearchError::Degenerate("b and c are parallel".into()));
    }
    let e2: Vec<f64> = r.iter().map(|x| x / rn).collect();

    let mut samples = plane_samples;
    loop {
        let mut curve = Vec::with_capacity(samples);
        let mut on_curve = false;
        for k in 0..samples {
            let theta = 2.0 * PI * k as f64 / samples as f64;
            let (s, co) = theta.sin_cos();
            let u: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| co * a + s * b).collect();
            let len = norm.eval(&u)?;
            let x: Vec<f64> = u.iter().map(|v| v / len).collect();
            let point = [norm.dist(&x, b)?, norm.dist(&x, c)?];
            if (point[0] - 1.0).hypot(point[1] - 1.0) <= ON_CURVE_TOL {
                on_curve = true;
            }
            curve.push(point);
        }
        if on_curve {
            return Ok(WindingReport {
                winding: 0,
                on_curve,
                samples,
            });
        }
        let (winding, largest) = winding_with_max_step(&curve, [1.0, 1.0]);
        if largest <= FRAC_PI_2 || samples >= MAX_PLANE_SAMPLES {
            return Ok(WindingReport {
                winding,
                on_curve,
                samples,
            });
        }
        samples = (2 * samples).min(MAX_PLANE_SAMPLES);
    }
}
