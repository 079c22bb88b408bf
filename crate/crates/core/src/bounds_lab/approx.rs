use serde::Serialize;

use super::LabError;

/// Number of Gauss–Chebyshev nodes used for the projection.
const PROJECTION_NODES: usize = 8192;
/// Grid size for the measured sup error on [−1, 1].
pub const SUP_GRID_POINTS: usize = 100_001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Chebyshev,
    Monomial,
}

/// An even polynomial P with P(0) = 0 approximating |t|^p on [−1, 1].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxPolynomial {
    pub p: f64,
    pub degree: usize,
    pub basis: Basis,
    /// Ascending coefficients in `basis`. In the Chebyshev basis the value
    /// is S(t) − S(0) for the series S, which makes P(0) = 0 exact.
    pub coefficients: Vec<f64>,
    pub sup_error: f64,
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

impl ApproxPolynomial {
    pub fn eval(&self, t: f64) -> f64 {
        match self.basis {
            Basis::Monomial => self
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, &c)| if c == 0.0 { 0.0 } else { c * t.powi(k as i32) })
                .sum(),
            Basis::Chebyshev => clenshaw(&self.coefficients, t) - clenshaw(&self.coefficients, 0.0),
        }
    }

    /// max |P(t) − |t|^p| over the uniform grid of [`SUP_GRID_POINTS`]
    /// points on [−1, 1].
    pub fn measure_sup_error(&self) -> f64 {
        let last = (SUP_GRID_POINTS - 1) as f64;
        (0..SUP_GRID_POINTS)
            .map(|i| {
                let t = -1.0 + 2.0 * i as f64 / last;
                (self.eval(t) - target(self.p, t)).abs()
            })
            .fold(0.0_f64, f64::max)
    }

    /// Coefficients in the monomial basis, constant term exactly 0. For the
    /// Chebyshev basis this conversion loses accuracy at high degree.
    pub fn monomial_coefficients(&self) -> Vec<f64> {
        let mut out = match self.basis {
            Basis::Monomial => self.coefficients.clone(),
            Basis::Chebyshev => {
                let d = self.coefficients.len();
                // Monomial expansions of T_0..T_{d−1} via T_{k+1} = 2t T_k − T_{k−1}.
                let mut cheb: Vec<Vec<f64>> = Vec::with_capacity(d);
                for k in 0..d {
                    let mut t = vec![0.0; d];
                    match k {
                        0 => t[0] = 1.0,
                        1 => t[1] = 1.0,
                        _ => {
                            for j in 0..d - 1 {
                                t[j + 1] = 2.0 * cheb[k - 1][j];
                            }
                            t.iter_mut().zip(&cheb[k - 2]).for_each(|(a, b)| *a -= b);
                        }
                    }
                    cheb.push(t);
                }
                let mut out = vec![0.0; d];
                for (ck, tk) in self.coefficients.iter().zip(&cheb) {
                    out.iter_mut().zip(tk).for_each(|(o, t)| *o += ck * t);
                }
                out
            }
        };
        if let Some(c0) = out.first_mut() {
            *c0 = 0.0;
        }
        for (k, c) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = 0.0;
            }
        }
        out
    }
}

fn target(p: f64, t: f64) -> f64 {
    if p.fract() == 0.0 && p <= i32::MAX as f64 {
        t.abs().powi(p as i32)
    } else {
        t.abs().powf(p)
    }
}

/// A near-minimax polynomial of degree ≤ d for |t|^p on [−1, 1], with
/// P(0) = 0 and only even powers.
///
/// When p is an even integer no larger than d the polynomial t^p itself is
/// returned. Otherwise the Chebyshev projection of |t|^p is truncated at
/// degree d, its odd terms dropped and its value at 0 subtracted.
pub fn minimax_abs_p(p: f64, d: usize) -> Result<ApproxPolynomial, LabError> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(LabError::Argument(format!("p = {p} must be >= 1")));
    }
    if d == 0 {
        return Err(LabError::Argument("degree must be at least 1".into()));
    }
    if p.fract() == 0.0 && (p as usize) % 2 == 0 && (p as usize) <= d {
        let mut c = vec![0.0; d + 1];
        c[p as usize] = 1.0;
        let mut poly = ApproxPolynomial {
            p,
            degree: d,
            basis: Basis::Monomial,
            coefficients: c,
            sup_error: 0.0,
        };
        poly.sup_error = poly.measure_sup_error();
        return Ok(poly);
    }

    let nodes = PROJECTION_NODES;
    let fvals: Vec<(f64, f64)> = (0..nodes)
        .map(|j| {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / nodes as f64;
            (theta, target(p, theta.cos()))
        })
        .collect();
    let coefficients: Vec<f64> = (0..=d)
        .map(|k| {
            if k % 2 == 1 {
                return 0.0;
            }
            let s: f64 = fvals
                .iter()
                .map(|&(theta, f)| f * (k as f64 * theta).cos())
                .sum();
            let c = 2.0 * s / nodes as f64;
            if k == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect();
    let mut poly = ApproxPolynomial {
        p,
        degree: d,
        basis: Basis::Chebyshev,
        coefficients,
        sup_error: 0.0,
    };
    poly.sup_error = poly.measure_sup_error();
    Ok(poly)
}
