use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_points, SearchError};
use crate::cayley_menger::lift_point;
use crate::linalg::{dot, norm2, sub};
use crate::norms::{Exponent, NormSpec};

pub const DAMPING: f64 = 0.5;
pub const MAX_ITERATIONS: usize = 10_000;
const CHANGE_TOL: f64 = 1e-12;
const DOMAIN_SLACK: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-8;
const BROYDEN_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtensionResult {
    pub new_point: Vec<f64>,
    pub iterations: usize,
    /// max_i |‖x − p_i‖ − 1|.
    pub residual: f64,
    pub converged: bool,
}

/// The scale α and constant ε with ‖x‖ ≤ α‖x‖₂ ≤ (1 + ε)‖x‖ for ℓ_p^n.
/// None for the other norm families.
pub fn euclidean_comparison(norm: &NormSpec, n: usize) -> Option<(f64, f64)> {
    let n = n as f64;
    match norm {
        NormSpec::Lp { p: Exponent::Infinity } => Some((1.0, n.sqrt() - 1.0)),
        NormSpec::Lp { p: Exponent::Finite(p) } if *p <= 2.0 => {
            let scale = n.powf(1.0 / p - 0.5);
            Some((scale, scale - 1.0))
        }
        NormSpec::Lp { p: Exponent::Finite(p) } => Some((1.0, n.powf(0.5 - 1.0 / p) - 1.0)),
        _ => None,
    }
}

/// Extends a 1-equilateral set of k ≤ n points by one point, using the
/// Euclidean structure from [`euclidean_comparison`] (the standard inner
/// product for norms outside the ℓ_p family).
pub fn extend_fixed_point(
    points: &[Vec<f64>],
    norm: &NormSpec,
    epsilon: f64,
) -> Result<ExtensionResult, SearchError> {
    let n = check_points(points, norm)?;
    let scale = euclidean_comparison(norm, n).map_or(1.0, |(s, _)| s);
    extend_fixed_point_with(points, norm, epsilon, scale)
}

/// Geometry of the Euclidean lift: an orthonormal basis of the affine hull
/// of the input plus one fresh direction, and the input in lower-triangular
/// coordinates of the scaled inner product.
struct Lift<'a> {
    points: &'a [Vec<f64>],
    basis: Vec<Vec<f64>>,
    extra: Vec<f64>,
    triangular: Vec<Vec<f64>>,
    scale: f64,
}

impl<'a> Lift<'a> {
    fn new(points: &'a [Vec<f64>], scale: f64) -> Result<Self, SearchError> {
        let n = points[0].len();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut triangular = Vec::new();
        for (j, p) in points.iter().enumerate().skip(1) {
            let u = sub(p, &points[0]);
            let coords: Vec<f64> = basis.iter().map(|b| dot(&u, b)).collect();
            let r = orthogonal_residual(&u, &basis);
            let len = norm2(&r);
            if len <= 1e-12 * norm2(&u).max(1.0) {
                return Err(SearchError::Degenerate(format!(
                    "point {j} lies in the affine hull of the previous points"
                )));
            }
            let mut t: Vec<f64> = coords.iter().map(|c| c * scale).collect();
            t.push(len * scale);
            triangular.push(t);
            basis.push(r.iter().map(|c| c / len).collect());
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for t in 0..n {
            let mut e = vec![0.0; n];
            e[t] = 1.0;
            let r = orthogonal_residual(&e, &basis);
            let len = norm2(&r);
            if best.as_ref().is_none_or(|(l, _)| len > *l) {
                best = Some((len, r));
            }
        }
        let (len, r) = best.expect("n >= 1");
        if len <= 1e-9 {
            return Err(SearchError::Degenerate("no direction outside the affine hull".into()));
        }
        Ok(Lift {
            points,
            basis,
            extra: r.iter().map(|c| c / len).collect(),
            triangular,
            scale,
        })
    }

    /// The point at scaled Euclidean distances ρ_i from p_i with positive
    /// coordinate along the fresh direction.
    fn place(&self, rho: &[f64], iteration: usize) -> Result<Vec<f64>, SearchError> {
        let (v, height_sq) = lift_point(&self.triangular, rho[0], &rho[1..])
            .map_err(|_| SearchError::Degenerate("singular lift".into()))?;
        if !(height_sq > 0.0) {
            return Err(SearchError::NoIntersection { iteration });
        }
        let h = height_sq.sqrt();
        let mut x = self.points[0].clone();
        for (vi, b) in v.iter().zip(&self.basis) {
            x.iter_mut().zip(b).for_each(|(xc, bc)| *xc += vi * bc / self.scale);
        }
        x.iter_mut().zip(&self.extra).for_each(|(xc, bc)| *xc += h * bc / self.scale);
        Ok(x)
    }
}

fn orthogonal_residual(u: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = u.to_vec();
    // Two passes of modified Gram–Schmidt.
    for _ in 0..2 {
        for b in basis {
            let c = dot(&r, b);
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    r
}

/// As [`extend_fixed_point`] with the Euclidean norm taken to be
/// `scale`·‖·‖₂, which must satisfy ‖x‖ ≤ scale·‖x‖₂ ≤ (1 + ε)‖x‖.
///
/// Iterates δ ← δ + θ(φ(δ) − δ) with φ(δ)_i = δ_i + 1 − ‖f(1 + δ) − p_i‖,
/// where f(ρ) sits at Euclidean distances ρ_i from the p_i. A Broyden solve
/// of φ(δ) = δ takes over when the damped iteration stalls.
pub fn extend_fixed_point_with(
    points: &[Vec<f64>],
    norm: &NormSpec,
    epsilon: f64,
    scale: f64,
) -> Result<ExtensionResult, SearchError> {
    let n = check_points(points, norm)?;
    let k = points.len();
    if k > n {
        return Err(SearchError::Argument(format!(
            "{k} points in R^{n}: at most n points can be extended"
        )));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(SearchError::Argument(format!("epsilon = {epsilon} must be finite and >= 0")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(SearchError::Argument(format!("scale = {scale} must be positive")));
    }
    let mut deviation = 0.0_f64;
    for i in 0..k {
        for j in i + 1..k {
            deviation = deviation.max((norm.dist(&points[i], &points[j])? - 1.0).abs());
        }
    }
    if deviation > 1e-9 {
        return Err(SearchError::NotEquilateral(deviation));
    }

    let lift = Lift::new(points, scale)?;
    let phi = |delta: &[f64], iteration: usize| -> Result<(Vec<f64>, Vec<f64>), SearchError> {
        let rho: Vec<f64> = delta.iter().map(|d| 1.0 + d).collect();
        let x = lift.place(&rho, iteration)?;
        let mut y = Vec::with_capacity(k);
        for (i, p) in points.iter().enumerate() {
            let yi = delta[i] + 1.0 - norm.dist(&x, p)?;
            if !(yi >= -DOMAIN_SLACK && yi <= epsilon + DOMAIN_SLACK) {
                return Err(SearchError::LeftDomain {
                    iteration,
                    index: i,
                    value: yi,
                });
            }
            y.push(yi);
        }
        Ok((y, x))
    };
    let residual_of = |x: &[f64]| -> Result<f64, SearchError> {
        let mut r = 0.0_f64;
        for p in points {
            r = r.max((norm.dist(x, p)? - 1.0).abs());
        }
        Ok(r)
    };

    let mut delta = vec![0.0; k];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let (y, _) = phi(&delta, iterations)?;
        iterations += 1;
        let mut change = 0.0_f64;
        for (d, yi) in delta.iter_mut().zip(&y) {
            let step = DAMPING * (yi - *d);
            *d += step;
            change = change.max(step.abs());
        }
        if change < CHANGE_TOL {
            break;
        }
    }
    let (_, mut x) = phi(&delta, iterations)?;
    let mut residual = residual_of(&x)?;

    if residual > RESIDUAL_TOL {
        let (d, bx, it) = broyden(&phi, delta, epsilon, iterations)?;
        delta = d;
        x = bx;
        iterations = it;
        residual = residual_of(&x)?;
    }
    let _ = delta;
    if residual > RESIDUAL_TOL {
        return Err(SearchError::NotConverged {
            iterations,
            residual,
        });
    }
    Ok(ExtensionResult {
        new_point: x,
        iterations,
        residual,
        converged: true,
    })
}

type Phi<'a> = dyn Fn(&[f64], usize) -> Result<(Vec<f64>, Vec<f64>), SearchError> + 'a;

/// Broyden's method on F(δ) = φ(δ) − δ starting from the Jacobian −I, with
/// iterates kept in [0, ε]^k.
fn broyden(
    phi: &Phi<'_>,
    mut delta: Vec<f64>,
    epsilon: f64,
    mut iterations: usize,
) -> Result<(Vec<f64>, Vec<f64>, usize), SearchError> {
    let k = delta.len();
    let residual = |y: &[f64], d: &[f64]| DVector::from_iterator(k, y.iter().zip(d).map(|(a, b)| a - b));
    let (y, mut x) = phi(&delta, iterations)?;
    let mut f = residual(&y, &delta);
    let mut jac = -DMatrix::<f64>::identity(k, k);
    for _ in 0..BROYDEN_ITERATIONS {
        if f.amax() < 1e-14 {
            break;
        }
        let Some(step) = jac.clone().lu().solve(&(-&f)) else {
            break;
        };
        let next: Vec<f64> = delta
            .iter()
            .zip(step.iter())
            .map(|(d, s)| (d + s).clamp(0.0, epsilon))
            .collect();
        iterations += 1;
        let (y, nx) = phi(&next, iterations)?;
        let nf = residual(&y, &next);
        let s = DVector::from_iterator(k, next.iter().zip(&delta).map(|(a, b)| a - b));
        let ss = s.dot(&s);
        if ss == 0.0 {
            break;
        }
        let dy = &nf - &f;
        jac += (&dy - &jac * &s) * s.transpose() / ss;
        delta = next;
        f = nf;
        x = nx;
    }
    Ok((delta, x, iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::verify_equilateral;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn planar_triangle() {
        let l2 = NormSpec::lp_finite(2.0);
        let r = extend_fixed_point(&[vec![0.0, 0.0], vec![1.0, 0.0]], &l2, 0.0).unwrap();
        assert!(r.converged);
        assert!(r.residual <= 1e-10);
        assert!(close(&r.new_point, &[0.5, 0.75f64.sqrt()], 1e-12), "{:?}", r.new_point);
    }

    #[test]
    fn regular_tetrahedron_apex() {
        let l2 = NormSpec::lp_finite(2.0);
        let tri = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.5, 0.75f64.sqrt(), 0.0]];
        let r = extend_fixed_point(&tri, &l2, 0.0).unwrap();
        let apex = [0.5, 3f64.sqrt() / 6.0, (2.0f64 / 3.0).sqrt()];
        assert!(close(&r.new_point, &apex, 1e-12), "{:?}", r.new_point);
    }

    #[test]
    fn near_euclidean_lp() {
        let p = 2.01;
        let set = crate::constructions::simplex_with_apex(2, p, true).unwrap();
        let lambda = set.claimed_distance.unwrap();
        let tri: Vec<Vec<f64>> = set
            .points
            .iter()
            .map(|x| vec![x[0] / lambda, x[1] / lambda, 0.0])
            .collect();
        let norm = NormSpec::lp_finite(p);
        let (_, eps) = euclidean_comparison(&norm, 3).unwrap();
        let r = extend_fixed_point(&tri, &norm, eps).unwrap();
        assert!(r.residual <= 1e-8);
        let mut all = tri.clone();
        all.push(r.new_point);
        assert!(verify_equilateral(&all, &norm, 1e-8).unwrap().ok);
    }

    #[test]
    fn comparison_constants_hold() {
        for p in [1.2, 1.9, 2.0, 2.5, 4.0] {
            let norm = NormSpec::lp_finite(p);
            let (s, e) = euclidean_comparison(&norm, 3).unwrap();
            for x in [[1.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.3, -2.0, 0.5]] {
                let nx = norm.eval(&x).unwrap();
                let ex = s * norm2(&x);
                assert!(nx <= ex * (1.0 + 1e-12) && ex <= (1.0 + e) * nx * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn rejections() {
        let l2 = NormSpec::lp_finite(2.0);
        let bad = vec![vec![0.0, 0.0], vec![2.0, 0.0]];
        assert!(matches!(extend_fixed_point(&bad, &l2, 0.0), Err(SearchError::NotEquilateral(_))));
        let full = vec![vec![0.0], vec![1.0]];
        assert!(matches!(extend_fixed_point(&full, &l2, 0.0), Err(SearchError::Argument(_))));
        // Understating epsilon for l_4 pushes phi out of [0, epsilon].
        let l4 = NormSpec::lp_finite(4.0);
        let pair = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let err = extend_fixed_point(&pair, &l4, 0.0).unwrap_err();
        assert!(matches!(err, SearchError::LeftDomain { index: 0, .. }), "{err}");
        assert!(err.is_numerical());
    }
}
