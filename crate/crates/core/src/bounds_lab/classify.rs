use super::LabError;
use crate::linalg::dot;
use crate::norms::{norm_eval, Exponent, NormSpec};

const BOUNDARY_SAMPLES: usize = 720;

/// e(X) for a two-dimensional normed space: 4 if the unit ball is a
/// parallelogram, 3 otherwise.
pub fn e2_classify(spec: &NormSpec) -> Result<u8, LabError> {
    if let Some(n) = spec.dimension() {
        if n != 2 {
            return Err(LabError::Argument(format!("norm lives in R^{n}, not the plane")));
        }
    }
    let parallelogram = match spec {
        NormSpec::Lp { p } => matches!(p, Exponent::Infinity) || *p == Exponent::Finite(1.0),
        NormSpec::Polytope { vertices } => hull_size(vertices) == 4,
        NormSpec::ConeL1Euclid { .. } => true,
        NormSpec::PowerSum { .. } => sampled_parallelogram(spec)?,
    };
    Ok(if parallelogram { 4 } else { 3 })
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Number of vertices of the planar convex hull (collinear points dropped).
fn hull_size(points: &[Vec<f64>]) -> usize {
    let mut pts: Vec<&Vec<f64>> = points.iter().collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    if pts.len() < 3 {
        return pts.len();
    }
    let scale = pts.iter().flat_map(|p| p.iter()).fold(0.0_f64, |m, c| m.max(c.abs()));
    let eps = 1e-12 * scale * scale;
    let mut hull: Vec<&Vec<f64>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&Vec<f64>>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull.len()
}

/// Samples the unit circle and tests whether it is the boundary of a
/// parallelogram: the chords between consecutive samples define supporting
/// functionals, and the two most common ones (up to sign) must describe the
/// whole circle as max(|⟨y_a,x⟩|, |⟨y_b,x⟩|) = 1.
fn sampled_parallelogram(spec: &NormSpec) -> Result<bool, LabError> {
    let mut boundary = Vec::with_capacity(BOUNDARY_SAMPLES);
    for k in 0..BOUNDARY_SAMPLES {
        let th = 2.0 * std::f64::consts::PI * k as f64 / BOUNDARY_SAMPLES as f64;
        let u = [th.cos(), th.sin()];
        let r = norm_eval(spec, &u)?;
        boundary.push([u[0] / r, u[1] / r]);
    }
    let mut clusters: Vec<([f64; 2], usize)> = Vec::new();
    for k in 0..BOUNDARY_SAMPLES {
        let a = boundary[k];
        let b = boundary[(k + 1) % BOUNDARY_SAMPLES];
        // y with ⟨y,a⟩ = ⟨y,b⟩ = 1.
        let det = a[0] * b[1] - a[1] * b[0];
        if det.abs() < 1e-300 {
            continue;
        }
        let mut y = [(b[1] - a[1]) / det, (a[0] - b[0]) / det];
        if y[0] < 0.0 || (y[0] == 0.0 && y[1] < 0.0) {
            y = [-y[0], -y[1]];
        }
        let scale = y[0].abs().max(y[1].abs());
        match clusters
            .iter_mut()
            .find(|(c, _)| (c[0] - y[0]).abs().max((c[1] - y[1]).abs()) <= 1e-6 * scale)
        {
            Some((_, count)) => *count += 1,
            None => clusters.push((y, 1)),
        }
    }
    if clusters.len() < 2 {
        return Ok(false);
    }
    clusters.sort_by(|a, b| b.1.cmp(&a.1));
    let (ya, yb) = (clusters[0].0, clusters[1].0);
    Ok(boundary.iter().all(|x| {
        let v = dot(&ya, x).abs().max(dot(&yb, x).abs());
        (v - 1.0).abs() <= 1e-9
    }))
}
