//! JSON file formats for the CLI: problems, solutions, and projection
//! inputs/outputs. Unknown keys are rejected on input; numbers are
//! written in round-trip decimal precision.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::core_types::{QPProblem, SimplexPoint, SolverConfig};
use crate::error::{Result, SolverError};
use crate::projection::ProjectionCertificate;
use crate::solver::{IterationRecord, SolveResult};

/// A QP instance: row-major dense Hessian, linear coefficient, optional
/// start (default uniform `1/n`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub hessian: Vec<f64>,
    pub linear: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn from_problem(problem: &QPProblem, start: Option<&SimplexPoint>) -> Self {
        let n = problem.dim();
        let mut hessian = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                hessian.push(problem.hessian()[(i, j)]);
            }
        }
        Self {
            n,
            hessian,
            linear: problem.linear().to_vec(),
            start: start.map(|s| s.as_slice().to_vec()),
        }
    }

    pub fn into_problem(self) -> Result<(QPProblem, SimplexPoint)> {
        let n = self.n;
        if n == 0 {
            return Err(SolverError::InvalidField {
                field: "n",
                reason: "must be at least 1".into(),
            });
        }
        if self.hessian.len() != n * n {
            return Err(SolverError::InvalidField {
                field: "hessian",
                reason: format!("expected {} entries for n={n}, found {}", n * n, self.hessian.len()),
            });
        }
        if self.linear.len() != n {
            return Err(SolverError::InvalidField {
                field: "linear",
                reason: format!("expected {n} entries, found {}", self.linear.len()),
            });
        }
        let hessian = DMatrix::from_row_slice(n, n, &self.hessian);
        let problem = QPProblem::new(hessian, self.linear).map_err(|e| match e {
            SolverError::NonFinite(what) => SolverError::InvalidField {
                field: if what == "hessian" { "hessian" } else { "linear" },
                reason: "non-finite entry".into(),
            },
            other => other,
        })?;
        let start = match self.start {
            Some(raw) => {
                if raw.len() != n {
                    return Err(SolverError::InvalidField {
                        field: "start",
                        reason: format!("expected {n} entries, found {}", raw.len()),
                    });
                }
                SimplexPoint::repaired(raw).map_err(|e| SolverError::InvalidField {
                    field: "start",
                    reason: e.to_string(),
                })?
            }
            None => SimplexPoint::uniform(n)?,
        };
        Ok((problem, start))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub epsilon: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub max_outer_iterations: usize,
    pub cg_zero_tolerance: f64,
    pub active_tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub direction_used: String,
    pub angle: f64,
    pub gate_angle: f64,
    pub step: f64,
    pub working_set_size: usize,
    pub stable_count: usize,
    pub cg_allowed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
    pub alpha: Vec<f64>,
}

impl From<&IterationRecord> for TraceEntry {
    fn from(rec: &IterationRecord) -> Self {
        Self {
            iteration: rec.iteration,
            objective: rec.objective,
            direction_used: rec.direction_used.as_str().to_string(),
            angle: rec.angle,
            gate_angle: rec.gate_angle,
            step: rec.step,
            working_set_size: rec.working_set_size,
            stable_count: rec.stable_count,
            cg_allowed: rec.cg_allowed,
            event: rec.event.map(|e| e.as_str().to_string()),
            alpha: rec.alpha.clone(),
        }
    }
}

/// Mirror of [`SolveResult`] (also used for oracle output with status
/// `"oracle"`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub alpha: Vec<f64>,
    pub objective: f64,
    pub status: String,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub cg_invocations: usize,
    pub cg_rejections: usize,
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
}

impl SolutionFile {
    pub fn from_result(result: &SolveResult, config: &SolverConfig, n: usize) -> Self {
        Self {
            alpha: result.alpha.as_slice().to_vec(),
            objective: result.objective,
            status: result.status.as_str().to_string(),
            kkt_residual: result.kkt_residual,
            iterations: result.iterations,
            cg_invocations: result.cg_invocations,
            cg_rejections: result.cg_rejections,
            config: ConfigEcho {
                epsilon: config.epsilon,
                theta1: config.theta1,
                theta2: config.theta2,
                max_outer_iterations: config.max_iterations_for(n),
                cg_zero_tolerance: config.cg_zero_tolerance,
                active_tolerance: config.active_tolerance,
            },
            trace: result
                .trace
                .as_ref()
                .map(|records| records.iter().map(TraceEntry::from).collect()),
        }
    }
}

/// Input of the `project` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionInput {
    pub g: Vec<f64>,
    #[serde(default)]
    pub constrained: Vec<usize>,
}

/// Output of the `project` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionOutput {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub mu: Vec<f64>,
    pub zero_set: Vec<usize>,
    pub mean_free: f64,
    pub kkt_residual: f64,
}

impl ProjectionOutput {
    pub fn from_certificate(cert: &ProjectionCertificate, kkt_residual: f64) -> Self {
        Self {
            x: cert.x.clone(),
            lambda: cert.lambda,
            mu: cert.mu.clone(),
            zero_set: cert.zero_set.as_slice().to_vec(),
            mean_free: cert.mean_free,
            kkt_residual,
        }
    }
}
