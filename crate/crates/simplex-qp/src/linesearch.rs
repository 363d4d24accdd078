//! Exact minimization of the quadratic objective along `-p`, clamped to
//! the largest step keeping the iterate on the simplex.

use crate::core_types::{dot, sum, IndexSet, QPProblem, SimplexPoint};
use crate::error::{Result, SolverError};

/// Ties between the unconstrained minimizer and the feasibility bound
/// within this tolerance are treated as a boundary hit.
const BOUNDARY_TIE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct LineSearchResult {
    /// The chosen step `u >= 0` along `-p`.
    pub step: f64,
    /// Coordinates driven exactly to zero at `u`.
    pub blocking: IndexSet,
    /// `p' H p`.
    pub curvature: f64,
    /// `d' p`.
    pub directional_derivative: f64,
}

/// Largest `u` with `alpha - u p >= 0`: the minimum of `alpha_i / p_i`
/// over `p_i > 0`, or positive infinity when no component of `p` is
/// positive.
pub fn max_feasible_step(alpha: &SimplexPoint, p: &[f64]) -> f64 {
    debug_assert!(sum(p).abs() <= 1e-10 * p.len().max(1) as f64);
    alpha
        .as_slice()
        .iter()
        .zip(p)
        .filter(|(_, &pi)| pi > 0.0)
        .map(|(&ai, &pi)| ai / pi)
        .fold(f64::INFINITY, f64::min)
}

/// Minimizes `phi(u) = q(alpha) - u d'p + u^2/2 p'Hp` over `[0, u_max]`.
///
/// A nonpositive `d'p` is an internal invariant violation (the descent
/// identity of the direction module rules it out) and is reported
/// loudly rather than mapped to `u = 0`.
pub fn exact_line_search(
    problem: &QPProblem,
    alpha: &SimplexPoint,
    p: &[f64],
    d: &[f64],
) -> Result<LineSearchResult> {
    let n = problem.dim();
    if alpha.len() != n || p.len() != n || d.len() != n {
        return Err(SolverError::DimensionMismatch {
            what: "line search inputs",
            expected: n,
            found: p.len(),
        });
    }
    if p.iter().all(|&v| v == 0.0) {
        return Err(SolverError::ZeroDirection);
    }
    let directional_derivative = dot(d, p);
    if directional_derivative <= 0.0 {
        return Err(SolverError::NonDescent(directional_derivative));
    }

    let u_max = max_feasible_step(alpha, p);
    let mut hp = vec![0.0; n];
    for i in 0..n {
        let row = problem.hessian().row(i);
        hp[i] = (0..n).map(|j| row[j] * p[j]).sum();
    }
    let curvature = dot(p, &hp);

    let (step, boundary) = if curvature > 0.0 {
        let u_unconstrained = directional_derivative / curvature;
        if u_max.is_finite() && u_unconstrained >= u_max - BOUNDARY_TIE {
            (u_max, true)
        } else {
            (u_unconstrained, false)
        }
    } else {
        if !u_max.is_finite() {
            return Err(SolverError::UnboundedDescent);
        }
        (u_max, true)
    };

    let blocking = if boundary {
        IndexSet::from_sorted_unchecked(
            alpha
                .as_slice()
                .iter()
                .zip(p)
                .enumerate()
                .filter(|(_, (&ai, &pi))| pi > 0.0 && ai / pi == u_max)
                .map(|(i, _)| i)
                .collect(),
        )
    } else {
        IndexSet::empty()
    };

    Ok(LineSearchResult {
        step,
        blocking,
        curvature,
        directional_derivative,
    })
}

/// `alpha - u p` with blocking coordinates written as exact zeros.
/// Round-off negatives are clamped and the sum is renormalized when it
/// drifts past 1e-13, keeping the iterate a valid simplex point.
pub fn apply_step(
    alpha: &SimplexPoint,
    p: &[f64],
    result: &LineSearchResult,
) -> Result<SimplexPoint> {
    let mut out: Vec<f64> = alpha
        .as_slice()
        .iter()
        .zip(p)
        .map(|(&ai, &pi)| ai - result.step * pi)
        .collect();
    for i in result.blocking.iter() {
        out[i] = 0.0;
    }
    for x in out.iter_mut() {
        if *x < 0.0 {
            debug_assert!(*x > -1e-9, "step produced component {x}");
            *x = 0.0;
        }
    }
    let s = sum(&out);
    if (s - 1.0).abs() > 1e-13 {
        for x in out.iter_mut() {
            *x /= s;
        }
    }
    SimplexPoint::new(out)
}
