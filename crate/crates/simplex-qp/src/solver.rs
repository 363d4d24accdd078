//! The active-set driver: gradient-projection exploration with an
//! angle-based choice between the reduced and projected directions, a
//! working-set stability counter, the conjugate-gradient switch, and
//! the saddle fallback that rejects a CG result which increased the
//! objective or left the nonnegative orthant.

use crate::cg::{constrained_cg, reduce_problem, scatter, CgStatus};
use crate::core_types::{norm, IndexSet, QPProblem, SimplexPoint, SolverConfig};
use crate::directions::compute_directions;
use crate::error::Result;
use crate::linesearch::{apply_step, exact_line_search};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    ConvergedProjection,
    ConvergedCg,
    MaxIterations,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::ConvergedProjection => "converged_projection",
            SolveStatus::ConvergedCg => "converged_cg",
            SolveStatus::MaxIterations => "max_iterations",
        }
    }

    pub fn is_converged(&self) -> bool {
        !matches!(self, SolveStatus::MaxIterations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionKind {
    Reduced,
    Projected,
}

impl DirectionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DirectionKind::Reduced => "reduced",
            DirectionKind::Projected => "projected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgEvent {
    Success,
    Rejected,
}

impl CgEvent {
    pub fn as_str(&self) -> &'static str {
        match self {
            CgEvent::Success => "cg_success",
            CgEvent::Rejected => "cg_rejected",
        }
    }
}

/// Per-iteration diagnostics. Beyond the basics this carries the state
/// the CG switch saw (`stable_count`, `cg_allowed`, `gate_angle`) and
/// the iterate itself, so the trace invariants are checkable from the
/// record alone.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub direction_used: DirectionKind,
    /// Angle that drove the direction choice at the top of the iteration.
    pub angle: f64,
    /// Angle of the recomputed directions that gated the CG switch.
    pub gate_angle: f64,
    pub step: f64,
    pub working_set_size: usize,
    pub stable_count: usize,
    pub cg_allowed: bool,
    pub event: Option<CgEvent>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub alpha: SimplexPoint,
    pub objective: f64,
    pub status: SolveStatus,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub cg_invocations: usize,
    pub cg_rejections: usize,
    pub trace: Option<Vec<IterationRecord>>,
}

/// First-order violation at a raw point: with `d = H alpha - c` and
/// `lambda = min_i d_i`, the largest of `|d_i - lambda|` on the support,
/// the sum defect, and any negativity.
pub fn verify_qp_kkt_at(problem: &QPProblem, alpha: &[f64]) -> Result<f64> {
    let n = problem.dim();
    if alpha.len() != n {
        return Err(crate::error::SolverError::DimensionMismatch {
            what: "alpha",
            expected: n,
            found: alpha.len(),
        });
    }
    let d = problem.gradient_at(alpha);
    let lambda = d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut residual = (alpha.iter().sum::<f64>() - 1.0).abs();
    for (&ai, &di) in alpha.iter().zip(&d) {
        residual = residual.max((-ai).max(0.0));
        if ai > 0.0 {
            residual = residual.max((di - lambda).abs());
        }
    }
    Ok(residual)
}

pub fn verify_qp_kkt(problem: &QPProblem, point: &SimplexPoint) -> Result<f64> {
    verify_qp_kkt_at(problem, point.as_slice())
}

/// Runs the active-set algorithm from `start`.
///
/// The working set is maintained as exactly the set of zero coordinates
/// after each step: the line search writes exact zeros at blocking
/// coordinates, and a projected-gradient step with a negative component
/// at a zero coordinate moves it off the boundary.
pub fn solve(
    problem: &QPProblem,
    start: &SimplexPoint,
    config: &SolverConfig,
) -> Result<SolveResult> {
    config.validate()?;
    let n = problem.dim();
    if start.len() != n {
        return Err(crate::error::SolverError::DimensionMismatch {
            what: "start",
            expected: n,
            found: start.len(),
        });
    }

    let mut alpha = start.clone();
    let mut working = alpha.zero_indices(config.active_tolerance);
    let mut stable_count = 0usize;
    let mut cg_allowed = true;
    let mut cg_invocations = 0usize;
    let mut cg_rejections = 0usize;
    let mut trace: Option<Vec<IterationRecord>> = config.trace_enabled.then(Vec::new);

    let mut d = problem.gradient(&alpha)?;
    let mut dirs = compute_directions(&d, &working, &alpha)?;

    let max_iterations = config.max_iterations_for(n);
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0usize;

    for iteration in 1..=max_iterations {
        if norm(&dirs.projected) < config.epsilon {
            status = SolveStatus::ConvergedProjection;
            break;
        }
        iterations = iteration;

        let (p, direction_used) = if dirs.angle < config.theta1 {
            (dirs.reduced.clone(), DirectionKind::Reduced)
        } else {
            (dirs.projected.clone(), DirectionKind::Projected)
        };
        let choice_angle = dirs.angle;

        let line = exact_line_search(problem, &alpha, &p, &d)?;
        let next = apply_step(&alpha, &p, &line)?;
        let next_working = next.zero_indices(config.active_tolerance);

        stable_count += 1;
        if next_working != working {
            stable_count = 0;
            cg_allowed = true;
        }
        working = next_working;
        alpha = next;

        d = problem.gradient(&alpha)?;
        dirs = compute_directions(&d, &working, &alpha)?;

        let gate_angle = dirs.angle;
        let gate_allowed = cg_allowed;
        let mut event = None;
        if cg_allowed && stable_count > n && dirs.angle < config.theta2 {
            cg_invocations += 1;
            let (reduced, reduced_start) = reduce_problem(problem, &working, &alpha)?;
            let outcome = constrained_cg(&reduced, &reduced_start, config.cg_zero_tolerance)?;

            let candidate = if outcome.status == CgStatus::Converged
                && outcome.alpha_reduced.iter().all(|&v| v >= 0.0)
            {
                let scattered = scatter(&outcome.alpha_reduced, reduced.free_indices(), n);
                SimplexPoint::repaired(scattered).ok()
            } else {
                None
            };
            // Saddle fallback: accept only a feasible point that does
            // not increase the objective.
            let accepted = candidate.and_then(|point| {
                let before = problem.objective(&alpha).ok()?;
                let after = problem.objective(&point).ok()?;
                (after <= before).then_some(point)
            });
            match accepted {
                Some(point) => {
                    alpha = point;
                    status = SolveStatus::ConvergedCg;
                    event = Some(CgEvent::Success);
                }
                None => {
                    cg_allowed = false;
                    cg_rejections += 1;
                    event = Some(CgEvent::Rejected);
                }
            }
        }

        if let Some(records) = trace.as_mut() {
            records.push(IterationRecord {
                iteration,
                objective: problem.objective(&alpha)?,
                direction_used,
                angle: choice_angle,
                gate_angle,
                step: line.step,
                working_set_size: working.len(),
                stable_count,
                cg_allowed: gate_allowed,
                event,
                alpha: alpha.as_slice().to_vec(),
            });
        }
        if status == SolveStatus::ConvergedCg {
            break;
        }
    }

    let objective = problem.objective(&alpha)?;
    let kkt_residual = verify_qp_kkt(problem, &alpha)?;
    Ok(SolveResult {
        alpha,
        objective,
        status,
        kkt_residual,
        iterations,
        cg_invocations,
        cg_rejections,
        trace,
    })
}

/// Working set of a point under the exact-zero convention; exposed for
/// diagnostics.
pub fn active_set(point: &SimplexPoint) -> IndexSet {
    point.zero_indices(0.0)
}
