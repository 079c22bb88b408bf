use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::SearchError;
use crate::norms::NormSpec;

/// Energy below which a configuration counts as equilateral.
pub const CONVERGED_ENERGY: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-13;
const MAX_SWEEPS: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub points: Vec<Vec<f64>>,
    /// Σ_{i<j} (‖p_i − p_j‖ − 1)².
    pub energy: f64,
    pub seed: u64,
    pub converged: bool,
}

/// Multi-start coordinate descent for m points at mutual distance 1 in the
/// given norm on ℝ^n. Seeds run concurrently; the lowest energy wins, ties
/// going to the lowest seed.
pub fn energy_search(
    norm: &NormSpec,
    n: usize,
    m: usize,
    seeds: &[u64],
) -> Result<SearchResult, SearchError> {
    if n == 0 || m < 2 {
        return Err(SearchError::Argument(format!("need n >= 1 and m >= 2, got n = {n}, m = {m}")));
    }
    if seeds.is_empty() {
        return Err(SearchError::Argument("no seeds given".into()));
    }
    if let Some(d) = norm.dimension() {
        if d != n {
            return Err(SearchError::Argument(format!("norm lives in R^{d}, search in R^{n}")));
        }
    }
    let runs: Vec<Result<SearchResult, SearchError>> =
        seeds.par_iter().map(|&s| descend(norm, n, m, s)).collect();
    let mut best: Option<SearchResult> = None;
    for run in runs {
        let run = run?;
        let better = best.as_ref().is_none_or(|b| {
            run.energy < b.energy || (run.energy == b.energy && run.seed < b.seed)
        });
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one seed"))
}

fn descend(norm: &NormSpec, n: usize, m: usize, seed: u64) -> Result<SearchResult, SearchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let mut dist = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = norm.dist(&points[i], &points[j])?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut energy = total_energy(&dist);
    let mut step = INITIAL_STEP;
    let mut row = vec![0.0; m];
    for _ in 0..MAX_SWEEPS {
        if step < MIN_STEP || energy == 0.0 {
            break;
        }
        let mut improved = false;
        for i in 0..m {
            for k in 0..n {
                let old = points[i][k];
                let current: f64 = (0..m).filter(|&j| j != i).map(|j| (dist[i][j] - 1.0).powi(2)).sum();
                for sign in [1.0, -1.0] {
                    points[i][k] = old + sign * step;
                    let mut trial = 0.0;
                    for j in 0..m {
                        if j != i {
                            row[j] = norm.dist(&points[i], &points[j])?;
                            trial += (row[j] - 1.0).powi(2);
                        }
                    }
                    if trial < current {
                        for j in 0..m {
                            if j != i {
                                dist[i][j] = row[j];
                                dist[j][i] = row[j];
                            }
                        }
                        improved = true;
                        break;
                    }
                    points[i][k] = old;
                }
            }
        }
        if improved {
            energy = total_energy(&dist);
        } else {
            step *= 0.5;
        }
    }
    let energy = total_energy(&dist);
    Ok(SearchResult {
        points,
        energy,
        seed,
        converged: energy < CONVERGED_ENERGY,
    })
}

fn total_energy(dist: &[Vec<f64>]) -> f64 {
    let m = dist.len();
    let mut e = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            e += (dist[i][j] - 1.0).powi(2);
        }
    }
    e
}
