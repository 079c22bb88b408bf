//! Approximating min(a, b) by a signed inner product over an adaptive
//! partition of [0, 1], with randomized thresholds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::LabError;

/// The constant c of the stopping rule h·len ≥ c·n·log2(n)/m.
pub const DEFAULT_AP_CONSTANT: f64 = 10_000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalClass {
    Base,
    Regular,
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<IntervalClass>,
    pub hits: usize,
    pub length: f64,
}

/// A partition 0 = u_0 < … < u_N = 1 with one threshold per interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordinatePartition {
    pub breakpoints: Vec<f64>,
    pub intervals: Vec<Interval>,
}

impl CoordinatePartition {
    /// An unclassified partition with the given thresholds.
    pub fn new(breakpoints: Vec<f64>, thresholds: Vec<f64>) -> Result<Self, LabError> {
        if breakpoints.len() < 2
            || breakpoints[0] != 0.0
            || *breakpoints.last().expect("nonempty") != 1.0
            || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(LabError::Argument(
                "breakpoints must increase strictly from 0 to 1".into(),
            ));
        }
        if thresholds.len() != breakpoints.len() - 1 {
            return Err(LabError::Argument("one threshold per interval is required".into()));
        }
        let intervals = breakpoints
            .windows(2)
            .zip(&thresholds)
            .map(|(w, &t)| {
                if t > w[0] && t < w[1] {
                    Ok(Interval {
                        lo: w[0],
                        hi: w[1],
                        threshold: t,
                        class: None,
                        hits: 0,
                        length: w[1] - w[0],
                    })
                } else {
                    Err(LabError::Argument(format!(
                        "threshold {t} is not inside ({}, {})",
                        w[0], w[1]
                    )))
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(CoordinatePartition {
            breakpoints,
            intervals,
        })
    }

    /// Index t − 1 of the open interval (u_{t−1}, u_t) containing x.
    pub fn locate(&self, x: f64) -> Result<usize, LabError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(LabError::Argument(format!("{x} is outside [0, 1]")));
        }
        let idx = self.breakpoints.partition_point(|&u| u < x);
        if idx < self.breakpoints.len() && self.breakpoints[idx] == x {
            return Err(LabError::OnBreakpoint(x));
        }
        Ok(idx - 1)
    }
}

/// The vectors (x̄, x̂, x̌) ∈ ℝ^N × ℝ^N × ℝ^N of a point of [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApVectors {
    pub bar: Vec<f64>,
    pub hat: Vec<f64>,
    pub check: Vec<f64>,
}

pub fn ap_vectors(x: f64, part: &CoordinatePartition) -> Result<ApVectors, LabError> {
    let t = part.locate(x)?;
    let n = part.intervals.len();
    let iv = &part.intervals[t];
    let root = iv.length.sqrt();
    let mut bar = vec![0.0; n];
    for (j, b) in bar.iter_mut().enumerate().take(t) {
        *b = part.intervals[j].length.sqrt();
    }
    bar[t] = (x - iv.lo) / root;
    let mut hat = vec![0.0; n];
    hat[t] = (x - iv.lo) / root;
    let mut check = vec![0.0; n];
    if x > iv.threshold {
        check[t] = root;
    }
    Ok(ApVectors { bar, hat, check })
}

/// ⟨ā, b̄⟩ − ⟨â, b̂⟩ + ⟨ǎ, b̌⟩.
pub fn signed_product(a: &ApVectors, b: &ApVectors) -> f64 {
    let ip = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
    ip(&a.bar, &b.bar) - ip(&a.hat, &b.hat) + ip(&a.check, &b.check)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorMoments {
    pub trials: usize,
    pub mean: f64,
    pub second_moment: f64,
    /// Standard error of the sample mean.
    pub mean_sigma: f64,
    /// Standard error of the sample second moment.
    pub second_moment_sigma: f64,
    /// (a − u_{t−1})(u_t − a) for a = min(a, b); E(X) is exactly 0.
    pub exact_second_moment: f64,
    pub quarter_length_sq: f64,
    pub max_abs_error: f64,
    pub length: f64,
}

/// Monte Carlo moments of X = min(a,b) − ⟨a,b⟩ over fresh uniform thresholds
/// for two points of one interval.
pub fn ap_error_moments(
    part: &CoordinatePartition,
    a: f64,
    b: f64,
    trials: usize,
    seed: u64,
) -> Result<ErrorMoments, LabError> {
    let ta = part.locate(a)?;
    if part.locate(b)? != ta {
        return Err(LabError::DifferentIntervals(a, b));
    }
    if trials < 2 {
        return Err(LabError::Argument("at least two trials are needed".into()));
    }
    let iv = &part.intervals[ta];
    let lo_v = a.min(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s1, mut s2, mut s4, mut max_abs) = (0.0, 0.0, 0.0, 0.0_f64);
    for _ in 0..trials {
        let tau = uniform_interior(&mut rng, iv.lo, iv.hi);
        let x = if lo_v <= tau { lo_v - iv.lo } else { lo_v - iv.hi };
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
        max_abs = max_abs.max(x.abs());
    }
    let nt = trials as f64;
    let mean = s1 / nt;
    let second = s2 / nt;
    let var = (s2 / nt - mean * mean).max(0.0);
    let var2 = (s4 / nt - second * second).max(0.0);
    Ok(ErrorMoments {
        trials,
        mean,
        second_moment: second,
        mean_sigma: (var / nt).sqrt(),
        second_moment_sigma: (var2 / nt).sqrt(),
        exact_second_moment: (lo_v - iv.lo) * (iv.hi - lo_v),
        quarter_length_sq: 0.25 * iv.length * iv.length,
        max_abs_error: max_abs,
        length: iv.length,
    })
}

fn uniform_interior(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let t = rng.random_range(lo..hi);
        if t > lo {
            return t;
        }
    }
}

/// The doubling trick: each coordinate x becomes (max(x,0), max(−x,0)), so
/// every point of ℓ_1^n lands in the nonnegative orthant of ℓ_1^{2n} with
/// norms and distances unchanged.
pub fn nonnegative_lift(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|x| x.iter().flat_map(|&c| [c.max(0.0), (-c).max(0.0)]).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionStats {
    /// Σ_I h_I·len_I over all intervals of all coordinates.
    pub sum_hit_length: f64,
    /// Σ_I h_I²·len_I².
    pub sum_hit_length_sq: f64,
    pub interval_count: usize,
    pub base_count: usize,
    pub regular_count: usize,
    pub singular_count: usize,
    /// (m − 2Σ h·len)² / (m + Σ h²len²).
    pub apthree_lhs: f64,
    /// 1 + 3·(number of intervals).
    pub apthree_rhs: f64,
    pub apthree_holds: bool,
    /// Whether m − 2Σ h·len ≥ 0, which the rank argument needs.
    pub aprequire_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalPartition {
    /// Point count and dimension as supplied.
    pub m_input: usize,
    pub n_input: usize,
    /// After rounding m down and n up to powers of 4.
    pub m: usize,
    pub n: usize,
    pub c: f64,
    /// The regularity threshold c·n·log2(n)/m.
    pub threshold: f64,
    pub seed: u64,
    /// Coordinates after padding and jitter, one row per point.
    pub values: Vec<Vec<f64>>,
    pub coordinates: Vec<CoordinatePartition>,
    pub stats: PartitionStats,
}

fn power_of_four_down(x: usize) -> usize {
    let mut p = 1;
    while p * 4 <= x {
        p *= 4;
    }
    p
}

fn power_of_four_up(x: usize) -> usize {
    let mut p = 1;
    while p < x {
        p *= 4;
    }
    p
}

/// Builds the base/regular/singular partition of every coordinate.
///
/// Points must be nonnegative with coordinates summing to 1. The point count
/// is rounded down to a power of 4 (extra points are dropped) and the
/// dimension up to a power of 4 (zero coordinates are appended). Values
/// repeated within a coordinate, or equal to 0, 1 or a fixed breakpoint, are
/// moved by (i + 1)·1e−12 for point index i.
pub fn ap_partition(points: &[Vec<f64>], c: f64, seed: u64) -> Result<IntervalPartition, LabError> {
    let m_input = points.len();
    if m_input == 0 {
        return Err(LabError::Argument("no points".into()));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(LabError::Argument(format!("c = {c} must be positive")));
    }
    let n_input = points[0].len();
    if n_input == 0 || points.iter().any(|p| p.len() != n_input) {
        return Err(LabError::Argument("inconsistent point dimensions".into()));
    }
    for (i, p) in points.iter().enumerate() {
        for (k, &v) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(LabError::OutOfUnitCube {
                    point: i,
                    coord: k,
                    value: v,
                });
            }
        }
        if (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(LabError::NotNormalized(i));
        }
    }

    let m = power_of_four_down(m_input);
    let n = power_of_four_up(n_input);
    let log_n = (n as f64).log2();
    let threshold = c * n as f64 * log_n / m as f64;

    // Breakpoints that do not depend on the data.
    let base_parts = ((m as f64 / n as f64).sqrt().round() as usize).max(1);
    let base_len = 1.0 / (n as f64 * base_parts as f64);
    let bands = (3.0 * log_n).round() as usize;
    let band_edge = |s: usize| if s == 0 { 1.0 } else if s == bands { 1.0 / n as f64 } else { (-(s as f64) / 3.0).exp2() };
    let mut fixed: Vec<f64> = (0..=base_parts).map(|j| j as f64 * base_len).collect();
    fixed.extend((0..=bands).map(band_edge));

    let mut values: Vec<Vec<f64>> = points[..m]
        .iter()
        .map(|p| {
            let mut v = p.clone();
            v.resize(n, 0.0);
            v
        })
        .collect();
    for k in 0..n {
        let mut seen: Vec<f64> = Vec::with_capacity(m);
        for (i, row) in values.iter_mut().enumerate() {
            let mut v = row[k];
            let step = (i + 1) as f64 * 1e-12;
            while seen.contains(&v) || fixed.contains(&v) {
                v = if v >= 0.5 { v - step } else { v + step };
            }
            row[k] = v;
            seen.push(v);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coordinates = Vec::with_capacity(n);
    for k in 0..n {
        let column: Vec<f64> = values.iter().map(|r| r[k]).collect();
        coordinates.push(partition_coordinate(
            &column, base_parts, base_len, bands, &band_edge, threshold, &mut rng,
        ));
    }

    let mut sum_hl = 0.0;
    let mut sum_hl2 = 0.0;
    let (mut base_count, mut regular_count, mut singular_count, mut interval_count) = (0, 0, 0, 0);
    for coord in &coordinates {
        for iv in &coord.intervals {
            let hl = iv.hits as f64 * iv.length;
            sum_hl += hl;
            sum_hl2 += hl * hl;
            interval_count += 1;
            match iv.class {
                Some(IntervalClass::Base) => base_count += 1,
                Some(IntervalClass::Regular) => regular_count += 1,
                _ => singular_count += 1,
            }
        }
    }
    let mf = m as f64;
    let lhs = (mf - 2.0 * sum_hl).powi(2) / (mf + sum_hl2);
    let rhs = 1.0 + 3.0 * interval_count as f64;
    Ok(IntervalPartition {
        m_input,
        n_input,
        m,
        n,
        c,
        threshold,
        seed,
        values,
        coordinates,
        stats: PartitionStats {
            sum_hit_length: sum_hl,
            sum_hit_length_sq: sum_hl2,
            interval_count,
            base_count,
            regular_count,
            singular_count,
            apthree_lhs: lhs,
            apthree_rhs: rhs,
            apthree_holds: lhs <= rhs,
            aprequire_holds: mf - 2.0 * sum_hl >= 0.0,
        },
    })
}

fn count_in(values: &[f64], lo: f64, hi: f64) -> usize {
    values.iter().filter(|&&v| v >= lo && v < hi).count()
}

#[allow(clippy::too_many_arguments)]
fn partition_coordinate(
    column: &[f64],
    base_parts: usize,
    base_len: f64,
    bands: usize,
    band_edge: &dyn Fn(usize) -> f64,
    threshold: f64,
    rng: &mut ChaCha8Rng,
) -> CoordinatePartition {
    // Pieces [lo, hi) with their class, listed from the top down.
    let mut pieces: Vec<(f64, f64, IntervalClass)> = Vec::new();
    for s in 1..=bands {
        let floor = band_edge(s);
        let mut top = band_edge(s - 1);
        // Values in (floor, top], highest first.
        let mut vals: Vec<f64> = column.iter().copied().filter(|&v| v > floor && v < top).collect();
        vals.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let mut idx = 0;
        loop {
            // The sweep over [t, top): `idx` values have been passed.
            let mut stop = None;
            let mut h = 0usize;
            while stop.is_none() {
                let next = vals.get(idx + h).copied();
                let segment_floor = next.unwrap_or(floor).max(floor);
                if h > 0 {
                    let mut t = top - threshold / h as f64;
                    while t > segment_floor && (h as f64) * (top - t) < threshold {
                        t = t.next_down();
                    }
                    if t > segment_floor {
                        stop = Some((t, h));
                        break;
                    }
                }
                match next {
                    None => break,
                    Some(v) => {
                        h += 1;
                        if h as f64 * (top - v) >= threshold {
                            // Stopped on a value: go slightly lower without
                            // picking up another hit.
                            let below = vals.get(idx + h).copied().unwrap_or(floor).max(floor);
                            let t = v - (1e-12_f64).min(0.5 * (v - below));
                            stop = Some((t, h));
                        }
                    }
                }
            }
            match stop {
                Some((t, h)) => {
                    pieces.push((t, top, IntervalClass::Regular));
                    idx += h;
                    top = t;
                }
                None => {
                    pieces.push((floor, top, IntervalClass::Singular));
                    break;
                }
            }
        }
    }
    for j in (0..base_parts).rev() {
        let lo = j as f64 * base_len;
        let hi = if j + 1 == base_parts { band_edge(bands) } else { (j + 1) as f64 * base_len };
        pieces.push((lo, hi, IntervalClass::Base));
    }
    pieces.reverse();

    let mut breakpoints: Vec<f64> = pieces.iter().map(|p| p.0).collect();
    breakpoints.push(1.0);
    let intervals = pieces
        .iter()
        .map(|&(lo, hi, class)| {
            let hits = count_in(column, lo, hi);
            let length = hi - lo;
            let class = match class {
                IntervalClass::Base => IntervalClass::Base,
                _ if hits as f64 * length >= threshold => IntervalClass::Regular,
                _ => IntervalClass::Singular,
            };
            Interval {
                lo,
                hi,
                threshold: uniform_interior(rng, lo, hi),
                class: Some(class),
                hits,
                length,
            }
        })
        .collect();
    CoordinatePartition {
        breakpoints,
        intervals,
    }
}
