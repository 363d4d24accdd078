//! Equality-constrained conjugate gradient on the free variables.
//!
//! The residual is projected onto the zero-sum subspace with the
//! formula `g = (m r_1 - sum(r), r_2 - r_1, ..., r_m - r_1)`, whose
//! components sum to zero and satisfy `r'g = sum((r_i - r_1)^2)`. Both
//! identities are exercised by tests. Iterates may leave the
//! nonnegative orthant; only the caller checks the final point.

use nalgebra::DMatrix;

use crate::core_types::{dot, sum, IndexSet, QPProblem, SimplexPoint};
use crate::error::{Result, SolverError};

/// The QP restricted to the free variables of a working set.
#[derive(Debug, Clone)]
pub struct ReducedQP {
    hessian: DMatrix<f64>,
    linear: Vec<f64>,
    free: IndexSet,
    parent_dim: usize,
}

impl ReducedQP {
    /// A reduced problem that is its own parent (free set `0..m`).
    pub fn standalone(hessian: DMatrix<f64>, linear: Vec<f64>) -> Result<Self> {
        let m = linear.len();
        if m == 0 {
            return Err(SolverError::EmptyInput);
        }
        if hessian.nrows() != m || hessian.ncols() != m {
            return Err(SolverError::DimensionMismatch {
                what: "reduced hessian",
                expected: m * m,
                found: hessian.nrows() * hessian.ncols(),
            });
        }
        Ok(Self {
            hessian,
            linear,
            free: IndexSet::from_sorted_unchecked((0..m).collect()),
            parent_dim: m,
        })
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn free_indices(&self) -> &IndexSet {
        &self.free
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let hx = self.multiply(x);
        0.5 * dot(x, &hx) - dot(x, &self.linear)
    }

    fn multiply(&self, v: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; m];
        for i in 0..m {
            let row = self.hessian.row(i);
            out[i] = (0..m).map(|j| row[j] * v[j]).sum();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgStatus {
    Converged,
    MaxIterations,
    NonpositiveCurvature,
}

/// Diagnostics captured at the top of each iteration, used by tests to
/// assert the algebraic identities of the residual projection.
#[derive(Debug, Clone)]
pub struct CgIterate {
    pub t: f64,
    /// `sum((r_i - r_1)^2)`; equals `t` in exact arithmetic.
    pub residual_identity: f64,
    pub sum_g: f64,
    pub sum_p: f64,
    pub norm_g: f64,
    pub norm_p: f64,
}

#[derive(Debug, Clone)]
pub struct CGOutcome {
    pub alpha_reduced: Vec<f64>,
    pub iterations: usize,
    pub final_t: f64,
    pub status: CgStatus,
    pub iterates: Vec<CgIterate>,
}

/// Extracts the rows, columns, and components at the free indices and
/// the reduced start point. Scattering the result back (zeros on the
/// working set) reconstructs the original point exactly.
pub fn reduce_problem(
    problem: &QPProblem,
    working: &IndexSet,
    alpha: &SimplexPoint,
) -> Result<(ReducedQP, Vec<f64>)> {
    let n = problem.dim();
    if alpha.len() != n {
        return Err(SolverError::DimensionMismatch {
            what: "alpha",
            expected: n,
            found: alpha.len(),
        });
    }
    let free = working.complement(n);
    let m = free.len();
    if m == 0 {
        return Err(SolverError::EmptyFreeSet);
    }
    debug_assert!(working.iter().all(|i| alpha.as_slice()[i] == 0.0));

    let h = problem.hessian();
    let mut hessian = DMatrix::zeros(m, m);
    let mut linear = vec![0.0; m];
    let mut start = vec![0.0; m];
    for (a, i) in free.iter().enumerate() {
        for (b, j) in free.iter().enumerate() {
            hessian[(a, b)] = h[(i, j)];
        }
        linear[a] = problem.linear()[i];
        start[a] = alpha.as_slice()[i];
    }
    Ok((
        ReducedQP {
            hessian,
            linear,
            free,
            parent_dim: n,
        },
        start,
    ))
}

/// Scatters a reduced vector back to the parent dimension, zeros
/// elsewhere.
pub fn scatter(reduced: &[f64], free: &IndexSet, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (pos, i) in free.iter().enumerate() {
        out[i] = reduced[pos];
    }
    out
}

fn project_residual(r: &[f64]) -> Vec<f64> {
    let m = r.len();
    let mut g = vec![0.0; m];
    g[0] = m as f64 * r[0] - sum(r);
    for i in 1..m {
        g[i] = r[i] - r[0];
    }
    g
}

/// Runs the constrained conjugate gradient recurrence for at most `m`
/// steps. Termination on `t == 0` is implemented as
/// `t <= zero_tol * max(1, ||r||^2)`; nonpositive curvature
/// (`p'Hp <= zero_tol * max(1, ||p||^2)`) returns the current iterate
/// with its own status rather than dividing through.
pub fn constrained_cg(reduced: &ReducedQP, start: &[f64], zero_tol: f64) -> Result<CGOutcome> {
    let m = reduced.dim();
    if start.len() != m {
        return Err(SolverError::DimensionMismatch {
            what: "cg start",
            expected: m,
            found: start.len(),
        });
    }
    if (sum(start) - 1.0).abs() > 1e-8 {
        return Err(SolverError::InvalidField {
            field: "start",
            reason: format!("components sum to {}, expected 1", sum(start)),
        });
    }

    let mut alpha = start.to_vec();
    let mut r: Vec<f64> = reduced
        .multiply(&alpha)
        .iter()
        .zip(reduced.linear())
        .map(|(hx, c)| hx - c)
        .collect();
    let mut g = project_residual(&r);
    let mut p: Vec<f64> = g.iter().map(|x| -x).collect();

    let mut iterates = Vec::with_capacity(m + 1);
    let mut steps = 0;
    loop {
        let t = dot(&r, &g);
        iterates.push(CgIterate {
            t,
            residual_identity: r.iter().map(|ri| (ri - r[0]).powi(2)).sum(),
            sum_g: sum(&g),
            sum_p: sum(&p),
            norm_g: dot(&g, &g).sqrt(),
            norm_p: dot(&p, &p).sqrt(),
        });
        let t_threshold = zero_tol * dot(&r, &r).max(1.0);
        if t <= t_threshold {
            return Ok(CGOutcome {
                alpha_reduced: alpha,
                iterations: steps,
                final_t: t,
                status: CgStatus::Converged,
                iterates,
            });
        }
        if steps == m {
            return Ok(CGOutcome {
                alpha_reduced: alpha,
                iterations: steps,
                final_t: t,
                status: CgStatus::MaxIterations,
                iterates,
            });
        }

        let hp = reduced.multiply(&p);
        let curvature = dot(&p, &hp);
        if curvature <= zero_tol * dot(&p, &p).max(1.0) {
            return Ok(CGOutcome {
                alpha_reduced: alpha,
                iterations: steps,
                final_t: t,
                status: CgStatus::NonpositiveCurvature,
                iterates,
            });
        }

        let a = t / curvature;
        for (ai, pi) in alpha.iter_mut().zip(&p) {
            *ai += a * pi;
        }
        for (ri, hpi) in r.iter_mut().zip(&hp) {
            *ri += a * hpi;
        }
        g = project_residual(&r);
        let u = dot(&r, &g) / t;
        for (pi, gi) in p.iter_mut().zip(&g) {
            *pi = -gi + u * *pi;
        }
        steps += 1;
    }
}
