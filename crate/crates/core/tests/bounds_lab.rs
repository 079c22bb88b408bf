use equilateral::bounds_lab::{
    ap_partition, ap_vectors, approx_identity_certificate, e2_classify, known_bounds,
    lattice_round, lattice_window, minimax_abs_p, nonnegative_lift, numerical_rank,
    rank_lower_bound, signed_product, smyth_matrix, CoordinatePartition, IntervalClass,
    NormFamily,
};
use equilateral::constructions::{cross_polytope_set, simplex_with_apex};
use equilateral::{Exponent, NormSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> Vec<Vec<f64>> {
    // Sum of `rank` signed rank-one terms, so low ranks actually occur.
    let mut a = vec![vec![0.0; n]; n];
    for _ in 0..rank {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        for i in 0..n {
            for j in 0..n {
                a[i][j] += s * v[i] * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    a
}

#[test]
fn rank_lemma_never_exceeds_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..200 {
        let n = 1 + trial % 30;
        let r = 1 + rng.random_range(0..n);
        let a = random_symmetric(&mut rng, n, r);
        let bound = rank_lower_bound(&a).unwrap();
        let rank = numerical_rank(&a).unwrap();
        assert!(bound <= rank as f64 + 1e-9, "trial {trial}: {bound} > {rank}");
    }
}

#[test]
fn rank_lemma_examples() {
    let eye = |n: usize| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    };
    assert_eq!(rank_lower_bound(&eye(3)).unwrap(), 3.0);
    assert_eq!(rank_lower_bound(&vec![vec![1.0; 3]; 3]).unwrap(), 1.0);
    let d = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]];
    assert_eq!(rank_lower_bound(&d).unwrap(), 2.0);
    let c = approx_identity_certificate(&eye(6)).unwrap();
    assert_eq!((c.epsilon, c.bound), (0.0, 6.0));
}

fn random_sign_matrix(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> Vec<Vec<f64>> {
    let mut a = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if rng.random_bool(0.5) { eps } else { -eps };
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

#[test]
fn approximate_identity_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let a = random_sign_matrix(&mut rng, 4, 0.5);
        let c = approx_identity_certificate(&a).unwrap();
        assert!((c.bound - 4.0 / 1.75).abs() < 1e-12);
        assert!(numerical_rank(&a).unwrap() >= 3);

        let a = random_sign_matrix(&mut rng, 16, 0.25);
        let c = approx_identity_certificate(&a).unwrap();
        assert!(c.bound >= 8.0);
        assert!(numerical_rank(&a).unwrap() as f64 >= c.bound);
    }
}

#[test]
fn lattice_pipeline_on_the_cross_polytope() {
    let set = cross_polytope_set(8).unwrap().scaled(0.5);
    let m = set.len();
    assert_eq!(m, 16);
    let grid = lattice_window(1.0, 8, m).unwrap();
    let base = 8.0 * (m as f64).sqrt();
    assert!((std::f64::consts::E - 1.0) * base <= grid as f64);
    assert!(grid as f64 + 1.0 <= std::f64::consts::E * base);
    let r = lattice_round(&set, grid).unwrap();
    assert!(r.max_rounding_error <= 0.5 / grid as f64 + 1e-15);
    for i in 0..m {
        assert_eq!(r.q[i][i], 1.0);
        for j in 0..m {
            if i != j {
                assert!(r.q[i][j].abs() < 1.0 / (m as f64).sqrt());
            }
        }
    }
    let c = approx_identity_certificate(&r.q).unwrap();
    assert!(c.bound >= m as f64 / 2.0);

    let set = cross_polytope_set(4).unwrap().scaled(0.5);
    let r = lattice_round(&set, 1000).unwrap();
    // p · n^{1/p} / N with p = 1, n = 4.
    assert!(r.max_deviation <= 4.0 / 1000.0 * 1.01);
}

#[test]
fn smyth_matrices_approach_the_identity() {
    let set = simplex_with_apex(4, 3.0, false).unwrap();
    let set = set.scaled(1.0 / set.claimed_distance.unwrap());
    for d in [8, 16, 32] {
        let poly = minimax_abs_p(3.0, d).unwrap();
        let s = smyth_matrix(&set, &poly).unwrap();
        assert!(s.unit_diagonal);
        assert!(s.max_offdiag <= s.offdiag_bound + 1e-15, "d = {d}");
    }
}

proptest! {
    #[test]
    fn polynomials_are_even_and_vanish_at_zero(p in 1.0..6.0f64, d in 1usize..40) {
        let poly = minimax_abs_p(p, d).unwrap();
        prop_assert_eq!(poly.eval(0.0), 0.0);
        for (k, c) in poly.coefficients.iter().enumerate() {
            if k % 2 == 1 {
                prop_assert_eq!(*c, 0.0);
            }
        }
        let mono = poly.monomial_coefficients();
        prop_assert_eq!(mono[0], 0.0);
    }
}

fn random_partition(rng: &mut ChaCha8Rng, size: usize) -> CoordinatePartition {
    let mut bp: Vec<f64> = (0..size - 1).map(|_| rng.random_range(0.001..0.999)).collect();
    bp.push(0.0);
    bp.push(1.0);
    bp.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bp.dedup();
    let th: Vec<f64> = bp.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    CoordinatePartition::new(bp, th).unwrap()
}

#[test]
fn min_identity_across_intervals() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 10_000 {
        let part = random_partition(&mut rng, 2 + checked % 20);
        let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let (Ok(ta), Ok(tb)) = (part.locate(a), part.locate(b)) else {
            continue;
        };
        if ta == tb {
            continue;
        }
        let ip = signed_product(&ap_vectors(a, &part).unwrap(), &ap_vectors(b, &part).unwrap());
        assert!((ip - a.min(b)).abs() < 1e-14, "{ip} vs {}", a.min(b));
        checked += 1;
    }
}

#[test]
fn partition_of_a_lifted_cross_polytope() {
    let set = cross_polytope_set(8).unwrap().scaled(0.5);
    let lifted: Vec<Vec<f64>> = nonnegative_lift(&set.points)
        .into_iter()
        .map(|x| x.iter().map(|c| 2.0 * c).collect())
        .collect();
    let part = ap_partition(&lifted, 1.0, 3).unwrap();
    let n = part.n as f64;
    assert!(part.stats.singular_count as f64 <= 3.0 * n * n.log2());
    assert!(part.stats.apthree_lhs.is_finite() && part.stats.apthree_rhs.is_finite());
    for coord in &part.coordinates {
        for iv in &coord.intervals {
            assert!(iv.class.is_some());
            assert!(iv.threshold > iv.lo && iv.threshold < iv.hi);
        }
        assert!(coord.intervals.iter().any(|iv| iv.class == Some(IntervalClass::Base)));
    }
}

#[test]
fn ledger_values() {
    let lp = |n, p| known_bounds(n, NormFamily::Lp { p: Exponent::Finite(p) }).unwrap();
    assert_eq!(lp(3, 1.0).exact, Some(6));
    assert_eq!(lp(4, 1.0).exact, Some(8));
    assert_eq!(lp(7, 4.0).exact, Some(8));
    let inf = known_bounds(5, NormFamily::Lp { p: Exponent::Infinity }).unwrap();
    assert_eq!(inf.exact, Some(32));
    for n in 1..=12 {
        assert_eq!(lp(n, 2.0).exact, Some(n as u64 + 1));
        for p in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
            assert!(lp(n, p).is_consistent(), "n = {n}, p = {p}");
        }
        assert!(known_bounds(n, NormFamily::Lp { p: Exponent::Infinity }).unwrap().is_consistent());
        assert!(known_bounds(n, NormFamily::StrictlyConvex).unwrap().is_consistent());
        assert!(known_bounds(n, NormFamily::General).unwrap().is_consistent());
    }
}

#[test]
fn planar_classification_agrees_with_ledger() {
    for (norm, e) in [
        (NormSpec::l_inf(), 4u8),
        (NormSpec::lp_finite(1.0), 4),
        (NormSpec::lp_finite(2.0), 3),
        (NormSpec::lp_finite(3.0), 3),
    ] {
        assert_eq!(e2_classify(&norm).unwrap(), e);
        if let NormSpec::Lp { p } = norm {
            assert_eq!(known_bounds(2, NormFamily::Lp { p }).unwrap().exact, Some(e as u64));
        }
    }
}
