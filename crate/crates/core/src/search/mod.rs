//! Verification, fixed-point extension, winding certificates and multi-start
//! energy search for equilateral configurations.

mod energy;
mod extend;
mod verify;
mod winding;

use thiserror::Error;

use crate::norms::NormError;

pub use energy::{energy_search, SearchResult, CONVERGED_ENERGY};
pub use extend::{
    euclidean_comparison, extend_fixed_point, extend_fixed_point_with, ExtensionResult,
    DAMPING, MAX_ITERATIONS,
};
pub use verify::{verify_equilateral, Verification};
pub use winding::{
    winding_certificate, winding_number, WindingReport, DEFAULT_PLANE_SAMPLES, MAX_PLANE_SAMPLES,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("input is not 1-equilateral: max deviation {0:e}")]
    NotEquilateral(f64),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("iteration {iteration}: phi_{index} = {value:e} left [0, epsilon]; the norm is not close enough to the Euclidean structure")]
    LeftDomain {
        iteration: usize,
        index: usize,
        value: f64,
    },
    #[error("iteration {iteration}: no point at the requested Euclidean distances")]
    NoIntersection { iteration: usize },
    #[error("fixed-point iteration did not converge after {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Norm(#[from] NormError),
}

impl SearchError {
    pub fn is_numerical(&self) -> bool {
        match self {
            SearchError::LeftDomain { .. }
            | SearchError::NoIntersection { .. }
            | SearchError::NotConverged { .. } => true,
            SearchError::Norm(e) => e.is_numerical(),
            _ => false,
        }
    }
}

/// Checks that all points live in ℝ^n and agree with the norm's dimension.
fn check_points(points: &[Vec<f64>], norm: &crate::NormSpec) -> Result<usize, SearchError> {
    let n = match points.first() {
        Some(p) => p.len(),
        None => return Err(SearchError::Argument("no points".into())),
    };
    if let Some(i) = points.iter().position(|p| p.len() != n) {
        return Err(SearchError::Argument(format!(
            "point {i} has {} coordinates, expected {n}",
            points[i].len()
        )));
    }
    if points.iter().flatten().any(|c| !c.is_finite()) {
        return Err(SearchError::Argument("non-finite coordinate".into()));
    }
    if let Some(d) = norm.dimension() {
        if d != n {
            return Err(SearchError::Argument(format!("norm lives in R^{d}, points in R^{n}")));
        }
    }
    Ok(n)
}
