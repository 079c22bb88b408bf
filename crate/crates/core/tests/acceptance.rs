//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report is always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use equilateral::bounds_lab::{
    ap_error_moments, ap_partition, ap_vectors, approx_identity_certificate, e2_classify,
    known_bounds, lattice_round, lattice_window, minimax_abs_p, nonnegative_lift,
    numerical_rank, rank_lower_bound, signed_product, CoordinatePartition, NormFamily,
};
use equilateral::cayley_menger::{
    cm_determinant, embed_metric, menger_check, DistanceMatrix, DEFAULT_TOL,
};
use equilateral::codes::{chernoff_degree_bound, exact_degree, greedy_sign_code, guaranteed_size};
use equilateral::constructions::{
    cross_polytope_set, flm_set, hypercube_set, petty_cone_example, simplex_with_apex,
    two_block_set, PointSet,
};
use equilateral::search::{
    energy_search, euclidean_comparison, extend_fixed_point, verify_equilateral,
    winding_certificate, DEFAULT_PLANE_SAMPLES,
};
use equilateral::{Exponent, NormSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const VERIFY_TOL: f64 = 1e-9;
const EMBED_REL_TOL: f64 = 1e-8;
const EXTEND_RESIDUAL: f64 = 1e-8;
const FLM_DISTANCE_TOL: f64 = 1e-6;
const MIDPOINT_GAP: f64 = 1e-12;
const SLOPE_TOL: f64 = 0.25;
const MIN_IDENTITY_TOL: f64 = 1e-14;
const SIGMAS: f64 = 4.0;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(()), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
        (o, _) => o,
    };
    let limit_note = limit.map_or(String::new(), |l| format!(", limit {}s", l.as_secs()));
    match &outcome {
        Ok(()) => println!("criterion {id:>2} {name}: PASS ({elapsed:.2?}{limit_note})"),
        Err(e) => println!("criterion {id:>2} {name}: FAIL ({elapsed:.2?}{limit_note}): {e}"),
    }
    outcome.is_ok()
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn verified(set: &PointSet, tol: f64) -> Result<f64, String> {
    let v = verify_equilateral(&set.points, &set.norm, tol).map_err(|e| e.to_string())?;
    ensure!(v.ok, "{:?}: deviation {}", set.norm, v.max_deviation);
    Ok(v.lambda)
}

fn constructions() -> Check {
    for n in 1..=10 {
        let cp = cross_polytope_set(n).map_err(|e| e.to_string())?;
        ensure!(verified(&cp, VERIFY_TOL)? == 2.0, "cross-polytope n={n}");
        let hc = hypercube_set(n).map_err(|e| e.to_string())?;
        ensure!(hc.len() == 1 << n, "hypercube size n={n}");
        let upper = known_bounds(n, NormFamily::Lp { p: Exponent::Infinity })
            .map_err(|e| e.to_string())?
            .best_upper();
        ensure!(hc.len() as u64 == upper, "hypercube misses the 2^n bound at n={n}");
        ensure!(verified(&hc, VERIFY_TOL)? == 2.0, "hypercube n={n}");
        if n >= 2 {
            for p in [1.5, 2.0, 3.0, 4.0] {
                let s = simplex_with_apex(n, p, false).map_err(|e| e.to_string())?;
                let l = verified(&s, VERIFY_TOL)?;
                ensure!((l - 2f64.powf(1.0 / p)).abs() <= VERIFY_TOL * l, "apex n={n} p={p}");
            }
        }
    }
    for k in [2, 3] {
        let (set, p) = two_block_set(k).map_err(|e| e.to_string())?;
        verified(&set, VERIFY_TOL)?;
        if k == 2 {
            ensure!((p - 3f64.ln() / 2f64.ln()).abs() < 1e-14, "two-block p = {p}");
        }
    }
    Ok(())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn constant_matrix(m: usize) -> DistanceMatrix {
    DistanceMatrix::new(
        (0..m)
            .map(|i| (0..m).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect(),
    )
    .expect("valid")
}

/// Affine independence at the zero threshold of `menger_check`, decided from
/// Gram determinants: a k-point prefix has |CM| = 2^(k-1) det G.
fn independent_at_tol(pts: &[Vec<f64>], scale: f64) -> bool {
    (2..=pts.len()).all(|k| {
        let g = nalgebra::DMatrix::from_fn(k - 1, k - 1, |i, j| {
            let (a, b) = (&pts[i + 1], &pts[j + 1]);
            (0..a.len()).map(|c| (a[c] - pts[0][c]) * (b[c] - pts[0][c])).sum::<f64>()
        });
        2f64.powi(k as i32 - 1) * g.determinant() > 10.0 * DEFAULT_TOL * scale.powi(2 * k as i32)
    })
}

fn cayley_menger_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rejected = 0;
    let mut trial = 0;
    while trial < 500 {
        let n = 1 + trial % 8;
        let pts: Vec<Vec<f64>> = (0..=n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let d = DistanceMatrix::from_points(&pts).map_err(|e| e.to_string())?;
        if !independent_at_tol(&pts, d.max_entry()) {
            rejected += 1;
            continue;
        }
        trial += 1;
        let report = menger_check(&d, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let sign_ok = report
            .prefix_signs
            .iter()
            .enumerate()
            .all(|(i, &s)| s == if i % 2 == 0 { 1 } else { -1 });
        ensure!(sign_ok, "trial {trial}: signs {:?}", report.prefix_signs);
        let emb = embed_metric(&d).map_err(|e| e.to_string())?;
        for i in 0..=n {
            for j in i + 1..=n {
                let want = d.get(i, j);
                let got = euclid(&emb[i], &emb[j]);
                ensure!((got - want).abs() <= EMBED_REL_TOL * want, "trial {trial}: {got} vs {want}");
            }
        }
    }
    println!("  rejected {rejected} numerically dependent draws");
    let two = cm_determinant(&constant_matrix(2), &[0, 1]).map_err(|e| e.to_string())?;
    let three = cm_determinant(&constant_matrix(3), &[0, 1, 2]).map_err(|e| e.to_string())?;
    ensure!(two == 2.0 && three == -3.0, "closed forms gave {two}, {three}");
    Ok(())
}

fn almost_equilateral_regime() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..100 {
        let n = 3 + trial % 6;
        let m = n + 1;
        let top = 1.0 + 1.0 / (n as f64 + 1.0);
        let mut rho = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let v = rng.random_range(1.0..=top);
                rho[i][j] = v;
                rho[j][i] = v;
            }
        }
        let d = DistanceMatrix::new(rho).map_err(|e| e.to_string())?;
        embed_metric(&d).map_err(|e| format!("trial {trial}: {e}"))?;
    }
    let l2 = NormSpec::lp_finite(2.0);
    for n in 2..=8 {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let mut pts = vec![vec![0.0; n], e1];
        while pts.len() < n + 1 {
            let r = extend_fixed_point(&pts, &l2, 0.0).map_err(|e| e.to_string())?;
            ensure!(r.residual <= EXTEND_RESIDUAL, "n={n}: residual {}", r.residual);
            pts.push(r.new_point);
        }
        let v = verify_equilateral(&pts, &l2, EXTEND_RESIDUAL).map_err(|e| e.to_string())?;
        ensure!(v.ok, "l_2^{n} simplex deviation {}", v.max_deviation);
    }
    for p in [1.9, 2.1] {
        let norm = NormSpec::lp_finite(p);
        let (_, eps) = euclidean_comparison(&norm, 3).expect("l_p");
        let mut pts = vec![vec![0.0; 3], vec![1.0, 0.0, 0.0]];
        while pts.len() < 4 {
            let r = extend_fixed_point(&pts, &norm, eps).map_err(|e| format!("p={p}: {e}"))?;
            ensure!(r.residual <= EXTEND_RESIDUAL, "p={p}: residual {}", r.residual);
            pts.push(r.new_point);
        }
        let v = verify_equilateral(&pts, &norm, EXTEND_RESIDUAL).map_err(|e| e.to_string())?;
        ensure!(v.ok, "l_{p}^3 deviation {}", v.max_deviation);
    }
    Ok(())
}

fn codes() -> Check {
    for n in 1..=16 {
        for delta in [0.25, 1.0 / 3.0, 0.5] {
            let err = |e: equilateral::codes::CodeError| e.to_string();
            let degree = exact_degree(n, delta).map_err(err)?;
            ensure!(degree as f64 <= chernoff_degree_bound(n, delta).map_err(err)?, "degree n={n}");
            let fam = greedy_sign_code(n, delta).map_err(err)?;
            let m = fam.len() as f64;
            ensure!(m >= (1u64 << n) as f64 / (degree + 1) as f64, "counting n={n} delta={delta}");
            ensure!(m >= guaranteed_size(n, delta).map_err(err)?, "guarantee n={n} delta={delta}");
            for (a, wa) in fam.signs.iter().enumerate() {
                for wb in &fam.signs[a + 1..] {
                    let ip: i64 = wa.iter().zip(wb).map(|(&x, &y)| (x * y) as i64).sum();
                    ensure!((ip.unsigned_abs() as f64) < delta * n as f64, "inner product n={n}");
                }
            }
        }
    }
    Ok(())
}

fn flm() -> Check {
    let (norm, set) = flm_set(12, 1.0 / 3.0, 2).map_err(|e| e.to_string())?;
    ensure!(set.len() >= 2, "family too small");
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let d = norm.dist(&set.points[i], &set.points[j]).map_err(|e| e.to_string())?;
            ensure!((d - 1.0).abs() <= FLM_DISTANCE_TOL, "distance {d}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut boundary = || -> Result<Vec<f64>, String> {
        let v: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = norm.eval(&v).map_err(|e| e.to_string())?;
        Ok(v.iter().map(|c| c / r).collect())
    };
    for _ in 0..200 {
        let (u, v) = (boundary()?, boundary()?);
        if u == v {
            continue;
        }
        let mid: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
        let m = norm.eval(&mid).map_err(|e| e.to_string())?;
        ensure!(m < 1.0 - MIDPOINT_GAP, "midpoint norm {m}");
    }
    Ok(())
}

fn rank_machinery() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..200 {
        let n = 1 + trial % 30;
        let r = 1 + rng.random_range(0..n);
        let mut a = vec![vec![0.0; n]; n];
        for _ in 0..r {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for i in 0..n {
                for j in 0..n {
                    a[i][j] += v[i] * v[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                a[i][j] = a[j][i];
            }
        }
        let lb = rank_lower_bound(&a).map_err(|e| e.to_string())?;
        let rank = numerical_rank(&a).map_err(|e| e.to_string())?;
        ensure!(lb <= rank as f64 + 1e-9, "trial {trial}: {lb} > {rank}");
    }
    for n in [4usize, 9, 16, 25] {
        let eps = 1.0 / (n as f64).sqrt();
        let mut a = vec![vec![1.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = if rng.random_bool(0.5) { eps } else { -eps };
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let c = approx_identity_certificate(&a).map_err(|e| e.to_string())?;
        ensure!(c.bound >= n as f64 / 2.0, "n={n}: bound {}", c.bound);
    }
    let set = cross_polytope_set(8).map_err(|e| e.to_string())?.scaled(0.5);
    let m = set.len();
    let grid = lattice_window(1.0, 8, m).ok_or("empty lattice window")?;
    let r = lattice_round(&set, grid).map_err(|e| e.to_string())?;
    for i in 0..m {
        ensure!(r.q[i][i] == 1.0, "diagonal {}", r.q[i][i]);
        for j in 0..m {
            ensure!(i == j || r.q[i][j].abs() < 1.0 / (m as f64).sqrt(), "Q[{i}][{j}] = {}", r.q[i][j]);
        }
    }
    let c = approx_identity_certificate(&r.q).map_err(|e| e.to_string())?;
    ensure!(c.bound >= m as f64 / 2.0, "lattice certificate {}", c.bound);
    Ok(())
}

fn approximation_decay() -> Check {
    let degrees = [4usize, 8, 16, 32, 64];
    for p in [1.0, 1.5, 3.0] {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &d in &degrees {
            let e = minimax_abs_p(p, d).map_err(|e| e.to_string())?.sup_error;
            ensure!(e > 0.0, "p={p} d={d}: zero error");
            xs.push((d as f64).ln());
            ys.push(e.ln());
        }
        let k = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        ensure!((slope + p).abs() <= SLOPE_TOL, "p={p}: slope {slope}");
    }
    for (p, d) in [(2.0, 2), (4.0, 4)] {
        let e = minimax_abs_p(p, d).map_err(|e| e.to_string())?.sup_error;
        ensure!(e == 0.0, "p={p} d={d}: error {e}");
    }
    Ok(())
}

fn alon_pudlak() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random_partition = |rng: &mut ChaCha8Rng, size: usize| {
        let mut bp: Vec<f64> = (0..size - 1).map(|_| rng.random_range(0.001..0.999)).collect();
        bp.extend([0.0, 1.0]);
        bp.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        bp.dedup();
        let th: Vec<f64> = bp
            .windows(2)
            .map(|w| rng.random_range(w[0]..w[1]).max(w[0].next_up()))
            .collect();
        CoordinatePartition::new(bp, th).expect("valid partition")
    };
    let mut checked = 0;
    while checked < 10_000 {
        let part = random_partition(&mut rng, 2 + checked % 30);
        let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let (Ok(ta), Ok(tb)) = (part.locate(a), part.locate(b)) else {
            continue;
        };
        if ta == tb {
            continue;
        }
        let va = ap_vectors(a, &part).map_err(|e| e.to_string())?;
        let vb = ap_vectors(b, &part).map_err(|e| e.to_string())?;
        let ip = signed_product(&va, &vb);
        ensure!((ip - a.min(b)).abs() <= MIN_IDENTITY_TOL, "{ip} vs min {}", a.min(b));
        checked += 1;
    }
    for trial in 0..50u64 {
        let part = random_partition(&mut rng, 8);
        let t = rng.random_range(0..part.intervals.len());
        let iv = &part.intervals[t];
        let a = rng.random_range(iv.lo..iv.hi).max(iv.lo.next_up());
        let b = rng.random_range(iv.lo..iv.hi).max(iv.lo.next_up());
        let mom = ap_error_moments(&part, a, b, 20_000, trial).map_err(|e| e.to_string())?;
        ensure!(mom.max_abs_error <= mom.length, "|X| {} > len {}", mom.max_abs_error, mom.length);
        ensure!(mom.mean.abs() <= SIGMAS * mom.mean_sigma + 1e-15, "E(X) = {}", mom.mean);
        ensure!(
            mom.second_moment <= mom.quarter_length_sq + SIGMAS * mom.second_moment_sigma,
            "E(X^2) = {}",
            mom.second_moment
        );
        ensure!(
            (mom.second_moment - mom.exact_second_moment).abs()
                <= SIGMAS * mom.second_moment_sigma + 1e-15,
            "closed form {} vs {}",
            mom.exact_second_moment,
            mom.second_moment
        );
    }
    let set = cross_polytope_set(8).map_err(|e| e.to_string())?;
    let lifted: Vec<Vec<f64>> = nonnegative_lift(&set.points);
    let part = ap_partition(&lifted, 1.0, 0).map_err(|e| e.to_string())?;
    ensure!(part.m == 16, "m = {}", part.m);
    let n = part.n as f64;
    ensure!(
        part.stats.singular_count as f64 <= 3.0 * n * n.log2(),
        "{} singular intervals",
        part.stats.singular_count
    );
    ensure!(
        part.stats.apthree_lhs.is_finite() && part.stats.apthree_rhs.is_finite(),
        "non-finite statistics"
    );
    Ok(())
}

fn ledger() -> Check {
    let report = |n, family| known_bounds(n, family).map_err(|e| e.to_string());
    let lp = |p: f64| NormFamily::Lp { p: Exponent::Finite(p) };
    for n in 1..=12 {
        ensure!(
            report(n, NormFamily::Lp { p: Exponent::Infinity })?.exact == Some(1 << n),
            "l_inf n={n}"
        );
        for p in [2.0, 4.0] {
            ensure!(report(n, lp(p))?.exact == Some(n as u64 + 1), "p={p} n={n}");
        }
        for p in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
            ensure!(report(n, lp(p))?.is_consistent(), "inconsistent p={p} n={n}");
        }
        for f in [NormFamily::StrictlyConvex, NormFamily::General] {
            ensure!(report(n, f)?.is_consistent(), "inconsistent {f:?} n={n}");
        }
    }
    ensure!(report(3, lp(1.0))?.exact == Some(6), "l_1^3");
    ensure!(report(4, lp(1.0))?.exact == Some(8), "l_1^4");
    for (norm, p) in [
        (NormSpec::l_inf(), Exponent::Infinity),
        (NormSpec::lp_finite(1.0), Exponent::Finite(1.0)),
        (NormSpec::lp_finite(1.5), Exponent::Finite(1.5)),
        (NormSpec::lp_finite(3.0), Exponent::Finite(3.0)),
    ] {
        let e = e2_classify(&norm).map_err(|e| e.to_string())?;
        ensure!(e == 3 || e == 4, "e2 = {e}");
        ensure!(report(2, NormFamily::Lp { p })?.exact == Some(e as u64), "plane {p:?}");
    }
    Ok(())
}

fn random_triple(rng: &mut ChaCha8Rng, norm: &NormSpec) -> Result<(Vec<f64>, Vec<f64>), String> {
    let unit = |v: Vec<f64>| -> Result<Vec<f64>, String> {
        let r = norm.eval(&v).map_err(|e| e.to_string())?;
        Ok(v.into_iter().map(|c| c / r).collect())
    };
    let b = unit((0..3).map(|_| rng.random_range(-1.0..1.0)).collect())?;
    let w: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
    let arc = |t: f64| unit(b.iter().zip(&w).map(|(x, y)| t.cos() * x + t.sin() * y).collect());
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if norm.dist(&arc(mid)?, &b).map_err(|e| e.to_string())? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((b.clone(), arc(0.5 * (lo + hi))?))
}

fn search_sanity() -> Check {
    let seeds: Vec<u64> = (0..64).collect();
    for (norm, n, m, want) in [
        (NormSpec::l_inf(), 2, 4, true),
        (NormSpec::lp_finite(1.0), 3, 6, true),
        (NormSpec::lp_finite(2.0), 2, 4, false),
    ] {
        let r = energy_search(&norm, n, m, &seeds).map_err(|e| e.to_string())?;
        ensure!(r.converged == want, "{norm:?} m={m}: energy {:e}", r.energy);
        if r.converged {
            let v = verify_equilateral(&r.points, &norm, 1e-6).map_err(|e| e.to_string())?;
            ensure!(v.ok, "{norm:?}: converged set fails verification");
        } else {
            println!("  energy floor for l_2^2, m = 4: {:e}", r.energy);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for norm in [NormSpec::lp_finite(2.0), NormSpec::lp_finite(1.8), NormSpec::lp_finite(2.2)] {
        for k in 0..100 {
            let (b, c) = random_triple(&mut rng, &norm)?;
            let w = winding_certificate(&norm, &b, &c, DEFAULT_PLANE_SAMPLES)
                .map_err(|e| e.to_string())?;
            ensure!(w.winding != 0 || w.on_curve, "{norm:?} triple {k}");
        }
    }
    let (norm, set) = petty_cone_example(3).map_err(|e| e.to_string())?;
    ensure!(verified(&set, 0.0)? == 2.0, "cone set");
    let e1 = [1.0, 0.0, 0.0];
    let m1 = [-1.0, 0.0, 0.0];
    for k in 0..200 {
        let t = 2.0 * std::f64::consts::PI * k as f64 / 200.0;
        let x = [0.0, t.cos(), t.sin()];
        let d = |a: &[f64], b: &[f64]| norm.dist(a, b).map_err(|e| e.to_string());
        ensure!((d(&x, &e1)? - 2.0).abs() < 1e-12 && (d(&x, &m1)? - 2.0).abs() < 1e-12, "sphere point {k}");
        let anti = [0.0, -x[1], -x[2]];
        ensure!((d(&x, &anti)? - 2.0).abs() < 1e-12, "antipode {k}");
        let s = t + rng.random_range(0.01..3.1);
        let y = [0.0, s.cos(), s.sin()];
        ensure!((d(&x, &y)? - 2.0).abs() > 1e-9, "non-antipodal pair at distance 2");
    }
    Ok(())
}

fn main() -> ExitCode {
    let results = [
        run(1, "construction suite", secs(10), constructions),
        run(2, "Cayley-Menger round trip", secs(30), cayley_menger_round_trip),
        run(3, "almost-equilateral embedding and extension", secs(60), almost_equilateral_regime),
        run(4, "sign codes", secs(60), codes),
        run(5, "FLM pipeline", None, flm),
        run(6, "rank machinery", secs(10), rank_machinery),
        run(7, "approximation decay", secs(30), approximation_decay),
        run(8, "min-embedding machinery", secs(60), alon_pudlak),
        run(9, "exact-value ledger", None, ledger),
        run(10, "search sanity", secs(120), search_sanity),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
