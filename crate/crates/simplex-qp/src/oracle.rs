//! Brute-force ground-truth solvers by exhaustive active-set
//! enumeration. Test and diagnostic use only; never on the solve path.

use nalgebra::{DMatrix, DVector};

use crate::core_types::{IndexSet, QPProblem};
use crate::error::{Result, SolverError};
use crate::projection::ProjectionProblem;
use crate::solver::verify_qp_kkt_at;

pub const DEFAULT_QP_GUARD: usize = 12;
pub const PROJECTION_GUARD: usize = 20;

/// A candidate (or winner) of the enumeration.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub x_or_alpha: Vec<f64>,
    pub active_set: IndexSet,
    pub objective: f64,
    pub kkt_residual: f64,
}

/// Solves the partial-sign projection by trying every subset of the
/// constrained set as the zero set and keeping the feasible candidate
/// of least distance to `g`. Subsets are visited in ascending
/// cardinality, ties broken by first-found.
pub fn oracle_project(problem: &ProjectionProblem) -> Result<Vec<f64>> {
    let g = problem.g();
    let n = g.len();
    let constrained: Vec<usize> = problem.constrained().iter().collect();
    let k = constrained.len();
    if k > PROJECTION_GUARD {
        return Err(SolverError::GuardExceeded {
            size: k,
            guard: PROJECTION_GUARD,
        });
    }

    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));

    let tol = 1e-12;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in masks {
        let in_zero = |pos: usize| -> bool {
            constrained
                .iter()
                .position(|&c| c == pos)
                .is_some_and(|j| mask >> j & 1 == 1)
        };
        let free_count = n - mask.count_ones() as usize;
        if free_count == 0 {
            continue;
        }
        let free_sum: f64 = (0..n).filter(|&i| !in_zero(i)).map(|i| g[i]).sum();
        let mean = free_sum / free_count as f64;

        let mut feasible = true;
        let mut x = vec![0.0; n];
        for i in 0..n {
            if in_zero(i) {
                // Dual feasibility: mu_i = 2 (g_i - mean) >= 0.
                if 2.0 * (g[i] - mean) < -tol {
                    feasible = false;
                    break;
                }
            } else {
                x[i] = g[i] - mean;
                if problem.constrained().contains(i) && x[i] > tol {
                    feasible = false;
                    break;
                }
            }
        }
        if !feasible {
            continue;
        }
        let dist: f64 = x.iter().zip(g).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, x));
        }
    }
    best.map(|(_, x)| x).ok_or(SolverError::NoCandidate)
}

/// All KKT candidates of the simplex QP found by enumerating zero sets
/// and solving the equality-constrained system on the free variables.
pub fn oracle_qp_candidates(problem: &QPProblem, guard: usize) -> Result<Vec<OracleSolution>> {
    let n = problem.dim();
    if n > guard {
        return Err(SolverError::GuardExceeded { size: n, guard });
    }

    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));

    let h = problem.hessian();
    let c = problem.linear();
    let mut candidates = Vec::new();
    for mask in masks {
        // mask marks the zeroed coordinates; the free set must be nonempty.
        if mask.count_ones() as usize == n {
            continue;
        }
        let free: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
        let m = free.len();

        // Stationarity on free coordinates plus the sum constraint:
        // [H_FF, -1; 1', 0] [alpha_F; lambda] = [c_F; 1].
        let mut system = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                system[(a, b)] = h[(i, j)];
            }
            system[(a, m)] = -1.0;
            system[(m, a)] = 1.0;
            rhs[a] = c[i];
        }
        rhs[m] = 1.0;

        let svd = system.svd(true, true);
        let sigma_max = svd.singular_values.max();
        let sigma_min = svd.singular_values.min();
        if !(sigma_min > 1e-10 * sigma_max) {
            continue; // singular reduced system; skipped by design
        }
        let Ok(solution) = svd.solve(&rhs, 0.0) else {
            continue;
        };
        let lambda = solution[m];

        let mut alpha = vec![0.0; n];
        let mut primal_ok = true;
        for (a, &i) in free.iter().enumerate() {
            alpha[i] = solution[a];
            if alpha[i] < -1e-12 {
                primal_ok = false;
                break;
            }
        }
        if !primal_ok {
            continue;
        }
        let d = problem.gradient_at(&alpha);
        let dual_ok = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .all(|i| d[i] - lambda >= -1e-8);
        if !dual_ok {
            continue;
        }

        // Clamp enumeration round-off so downstream feasibility checks
        // see exact zeros.
        for x in alpha.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let objective = problem.objective_at(&alpha);
        let kkt_residual = verify_qp_kkt_at(problem, &alpha)?;
        let zero_set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        candidates.push(OracleSolution {
            x_or_alpha: alpha,
            active_set: IndexSet::from_sorted_unchecked(zero_set),
            objective,
            kkt_residual,
        });
    }
    Ok(candidates)
}

/// The minimum-objective KKT candidate; enumeration order makes ties
/// deterministic (first found wins).
pub fn oracle_qp(problem: &QPProblem, guard: usize) -> Result<OracleSolution> {
    let candidates = oracle_qp_candidates(problem, guard)?;
    candidates
        .into_iter()
        .reduce(|best, cand| if cand.objective < best.objective { cand } else { best })
        .ok_or(SolverError::NoCandidate)
}
