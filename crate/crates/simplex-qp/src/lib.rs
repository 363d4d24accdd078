//! Quadratic programming on the standard simplex.
//!
//! The solver explores the simplex with projected and reduced gradient
//! steps, using a partial-sign-constrained hyperplane projection to keep
//! iterates feasible, and switches to an equality-constrained conjugate
//! gradient once the working set looks stationary (stable for many
//! iterations with a small angle between the two directions). The
//! Hessian does not need to be positive semidefinite; a saddle fallback
//! rejects conjugate-gradient results that increase the objective or
//! leave the nonnegative orthant.
//!
//! Brute-force enumeration oracles (`oracle` module) provide ground
//! truth for testing at small sizes, and the `simplex-qp` binary wraps
//! solving, projecting, instance generation, and a projection scaling
//! benchmark behind JSON file formats.

pub mod cg;
pub mod core_types;
pub mod directions;
pub mod error;
pub mod files;
pub mod generate;
pub mod linesearch;
pub mod oracle;
pub mod projection;
pub mod solver;

pub use core_types::{IndexSet, QPProblem, SimplexPoint, SolverConfig};
pub use error::{Result, SolverError};
pub use projection::{project_hyperplane, project_partial_sign, ProjectionProblem};
pub use solver::{solve, verify_qp_kkt, SolveResult, SolveStatus};
