//! Reduced and projected gradient directions, their feasibility
//! projections, and the angle test between them.
//!
//! The reduced gradient zeroes the working set before projection; the
//! projected gradient zeroes only the binding set (working-set indices
//! whose gradient component already has the optimal sign). Both are
//! then projected onto the zero-sum hyperplane with nonpositivity
//! imposed on the coordinates currently at zero.

use crate::core_types::{dot, norm, IndexSet, SimplexPoint};
use crate::error::Result;
use crate::projection::{project_partial_sign, ProjectionProblem};

/// Norms below this are treated as a degenerate direction.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Both search directions for one iterate.
#[derive(Debug, Clone)]
pub struct DirectionPair {
    /// Projection of the working-set-masked gradient.
    pub reduced: Vec<f64>,
    /// Projection of the binding-set-masked gradient.
    pub projected: Vec<f64>,
    /// Angle between the two projections, in `[0, pi]`.
    pub angle: f64,
    /// The binding set used for the projected direction.
    pub binding: IndexSet,
}

/// `{i in working : d_i >= 0}`.
pub fn binding_set(working: &IndexSet, d: &[f64]) -> IndexSet {
    IndexSet::from_sorted_unchecked(working.iter().filter(|&i| d[i] >= 0.0).collect())
}

/// Copy of `d` with the masked components set to zero.
pub fn mask_gradient(d: &[f64], mask: &IndexSet) -> Vec<f64> {
    let mut out = d.to_vec();
    for i in mask.iter() {
        out[i] = 0.0;
    }
    out
}

/// Projects a masked gradient: coordinates in `fixed` stay at zero and
/// the complement is projected onto the zero-sum hyperplane with
/// nonpositivity on `sign_constrained \ fixed`.
pub fn project_direction(
    g: &[f64],
    fixed: &IndexSet,
    sign_constrained: &IndexSet,
) -> Result<Vec<f64>> {
    let n = g.len();
    let free: Vec<usize> = (0..n).filter(|&i| !fixed.contains(i)).collect();
    if free.is_empty() {
        return Ok(vec![0.0; n]);
    }

    let sub_g: Vec<f64> = free.iter().map(|&i| g[i]).collect();
    let sub_constrained: Vec<usize> = free
        .iter()
        .enumerate()
        .filter(|(_, &i)| sign_constrained.contains(i))
        .map(|(pos, _)| pos)
        .collect();
    let problem = ProjectionProblem::new(
        sub_g,
        IndexSet::from_sorted_unchecked(sub_constrained),
    )?;
    let cert = project_partial_sign(&problem)?;

    let mut out = vec![0.0; n];
    for (pos, &i) in free.iter().enumerate() {
        out[i] = cert.x[pos];
    }
    Ok(out)
}

/// Angle between two vectors with the cosine clamped to `[-1, 1]`.
/// Degenerate norms (below [`DEGENERATE_NORM`]) map to `pi`, which
/// exceeds every threshold: the caller then falls back to the projected
/// direction and the conjugate-gradient switch stays closed.
pub fn angle_between(u: &[f64], v: &[f64]) -> f64 {
    let nu = norm(u);
    let nv = norm(v);
    if nu < DEGENERATE_NORM || nv < DEGENERATE_NORM {
        return std::f64::consts::PI;
    }
    (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0).acos()
}

/// Assembles the binding set, both maskings, both projections, and the
/// angle for one iterate. Sign constraints use exact-zero membership of
/// `alpha`, independent of the working set.
pub fn compute_directions(
    d: &[f64],
    working: &IndexSet,
    alpha: &SimplexPoint,
) -> Result<DirectionPair> {
    let sign_constrained = alpha.zero_indices(0.0);
    // The multiplier estimate for a working-set constraint on the
    // simplex is d_i - lambda with lambda estimated by d'alpha (the
    // equality multiplier at a stationary point); the raw d_i sign is
    // only correct when lambda = 0 and falsely binds coordinates at
    // vertices with positive support gradient.
    let lambda_estimate = dot(d, alpha.as_slice());
    let shifted: Vec<f64> = d.iter().map(|di| di - lambda_estimate).collect();
    let binding = binding_set(working, &shifted);

    let reduced_raw = mask_gradient(d, working);
    let projected_raw = mask_gradient(d, &binding);
    let reduced = project_direction(&reduced_raw, working, &sign_constrained)?;
    let projected = project_direction(&projected_raw, &binding, &sign_constrained)?;
    let angle = angle_between(&projected, &reduced);

    Ok(DirectionPair {
        reduced,
        projected,
        angle,
        binding,
    })
}
