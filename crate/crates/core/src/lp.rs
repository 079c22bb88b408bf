// Thin wrappers over the `minilp` simplex solver for the two linear programs
// the norms module needs.

use minilp::{ComparisonOp, Error as LpError, OptimizationDirection, Problem};

use crate::linalg::dot;

pub(crate) enum GaugeOutcome {
    Value(f64),
    /// x is outside the cone spanned by the vertices.
    Unreachable,
    Failed(String),
}

/// Minkowski functional of `conv(vertices)` at `x`:
/// min sum(mu) subject to sum_k mu_k v_k = x, mu >= 0.
pub(crate) fn gauge(vertices: &[Vec<f64>], x: &[f64]) -> GaugeOutcome {
    if x.iter().all(|&c| c == 0.0) {
        return GaugeOutcome::Value(0.0);
    }
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = vertices
        .iter()
        .map(|_| problem.add_var(1.0, (0.0, f64::INFINITY)))
        .collect();
    for (k, &xk) in x.iter().enumerate() {
        let row: Vec<_> = vars
            .iter()
            .zip(vertices)
            .filter(|(_, v)| v[k] != 0.0)
            .map(|(&var, v)| (var, v[k]))
            .collect();
        problem.add_constraint(row, ComparisonOp::Eq, xk);
    }
    match problem.solve() {
        Ok(sol) => GaugeOutcome::Value(sol.objective().max(0.0)),
        Err(LpError::Infeasible) => GaugeOutcome::Unreachable,
        Err(e) => GaugeOutcome::Failed(e.to_string()),
    }
}

/// Finds y with <y, target> = 1 maximising the margin s such that
/// |<y, other>| <= 1 - s for every other point. Returns (y, s), or `None` when
/// no functional takes the value 1 on `target`.
pub(crate) fn separating_functional(
    target: &[f64],
    others: &[&[f64]],
) -> Result<Option<(Vec<f64>, f64)>, String> {
    let n = target.len();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let ys: Vec<_> = (0..n)
        .map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let margin = problem.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    problem.add_constraint(
        ys.iter().zip(target).map(|(&v, &c)| (v, c)).collect::<Vec<_>>(),
        ComparisonOp::Eq,
        1.0,
    );
    for other in others {
        let mut plus: Vec<_> = ys.iter().zip(other.iter()).map(|(&v, &c)| (v, c)).collect();
        plus.push((margin, 1.0));
        problem.add_constraint(plus, ComparisonOp::Le, 1.0);
        let mut minus: Vec<_> = ys.iter().zip(other.iter()).map(|(&v, &c)| (v, -c)).collect();
        minus.push((margin, 1.0));
        problem.add_constraint(minus, ComparisonOp::Le, 1.0);
    }
    match problem.solve() {
        Ok(sol) => {
            let mut y: Vec<f64> = ys.iter().map(|&v| sol[v]).collect();
            let scale = dot(&y, target);
            if scale <= 0.0 {
                return Ok(None);
            }
            y.iter_mut().for_each(|c| *c /= scale);
            let worst = others
                .iter()
                .map(|o| dot(&y, o).abs())
                .fold(0.0_f64, f64::max);
            Ok(Some((y, 1.0 - worst)))
        }
        Err(LpError::Infeasible) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}
