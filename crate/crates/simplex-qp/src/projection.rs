//! Projection onto the zero-sum hyperplane with sign constraints on a
//! subset of coordinates, together with a verifiable KKT certificate.
//!
//! The projection minimizes `||x - g||^2` subject to `e'x = 0` and
//! `x_i <= 0` for `i` in the constrained set. It is solved by sorting
//! `g` in descending order and peeling constrained coordinates above the
//! running mean of the remaining entries, so the cost is dominated by
//! the sort.

use crate::core_types::{check_finite, sum, IndexSet};
use crate::error::{Result, SolverError};

/// A vector `g` plus the set of positions required to be nonpositive.
#[derive(Debug, Clone)]
pub struct ProjectionProblem {
    g: Vec<f64>,
    constrained: IndexSet,
}

impl ProjectionProblem {
    pub fn new(g: Vec<f64>, constrained: IndexSet) -> Result<Self> {
        if g.is_empty() {
            return Err(SolverError::EmptyInput);
        }
        check_finite(&g, "projection input")?;
        if let Some(&last) = constrained.as_slice().last() {
            if last >= g.len() {
                return Err(SolverError::IndexOutOfRange {
                    index: last,
                    len: g.len(),
                });
            }
        }
        Ok(Self { g, constrained })
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn constrained(&self) -> &IndexSet {
        &self.constrained
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

/// The solution of a partial-sign projection plus the multipliers and
/// zero set that prove its optimality.
#[derive(Debug, Clone)]
pub struct ProjectionCertificate {
    /// The projected vector, in the input's coordinate order.
    pub x: Vec<f64>,
    /// Multiplier of the equality constraint; equals `-2 * mean_free`.
    pub lambda: f64,
    /// Inequality multipliers; zero outside the constrained set.
    pub mu: Vec<f64>,
    /// Constrained coordinates pinned to exact zero.
    pub zero_set: IndexSet,
    /// Mean of `g` over the coordinates left free.
    pub mean_free: f64,
}

/// Solves the partial-sign projection.
///
/// Ties between equal components keep input order, so the certificate is
/// deterministic even when the minimizer is not unique.
pub fn project_partial_sign(problem: &ProjectionProblem) -> Result<ProjectionCertificate> {
    Ok(project_impl(problem).0)
}

/// Same as [`project_partial_sign`] but also returns the sequence of
/// running means, one per removed coordinate. The sequence is
/// non-increasing; tests assert it.
pub(crate) fn project_impl(problem: &ProjectionProblem) -> (ProjectionCertificate, Vec<f64>) {
    let g = &problem.g;
    let n = g.len();

    // Stable descending sort by value via an index permutation.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| g[j].partial_cmp(&g[i]).unwrap().then(i.cmp(&j)));
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    // Constrained positions in sorted coordinates, ascending, i.e. the
    // constrained entries visited from largest g downwards.
    let mut constrained_ranks: Vec<usize> = problem.constrained.iter().map(|k| rank[k]).collect();
    constrained_ranks.sort_unstable();

    let total = sum(g);
    let mut s = total;
    let mut a = total / n as f64;
    let mut zeroed = vec![false; n];
    let mut means = Vec::new();

    for (step, &r) in constrained_ranks.iter().enumerate() {
        let value = g[order[r]];
        if value > a {
            let remaining = n - (step + 1);
            if remaining == 0 {
                // Unreachable: the smallest remaining entry can never
                // exceed the mean of itself.
                break;
            }
            s -= value;
            a = s / remaining as f64;
            zeroed[r] = true;
            means.push(a);
        } else {
            break;
        }
    }

    let mut x = vec![0.0; n];
    let mut mu = vec![0.0; n];
    let mut zero_set = Vec::new();
    for i in 0..n {
        if zeroed[rank[i]] {
            x[i] = 0.0;
            mu[i] = 2.0 * (g[i] - a);
            zero_set.push(i);
        } else {
            x[i] = g[i] - a;
        }
    }

    let cert = ProjectionCertificate {
        x,
        lambda: -2.0 * a,
        mu,
        zero_set: IndexSet::from_sorted_unchecked(zero_set),
        mean_free: a,
    };
    (cert, means)
}

/// Projection onto the zero-sum hyperplane alone: `g` minus its mean.
pub fn project_hyperplane(g: &[f64]) -> Result<Vec<f64>> {
    if g.is_empty() {
        return Err(SolverError::EmptyInput);
    }
    check_finite(g, "projection input")?;
    let mean = sum(g) / g.len() as f64;
    Ok(g.iter().map(|x| x - mean).collect())
}

/// Maximum violation of the KKT system by a certificate: primal
/// feasibility (sum and signs), dual feasibility, complementary
/// slackness, and stationarity `2x - 2g - lambda e + mu = 0`.
pub fn verify_projection_kkt(
    problem: &ProjectionProblem,
    cert: &ProjectionCertificate,
) -> Result<f64> {
    let n = problem.len();
    if cert.x.len() != n || cert.mu.len() != n {
        return Err(SolverError::DimensionMismatch {
            what: "certificate",
            expected: n,
            found: cert.x.len(),
        });
    }
    let mut residual = sum(&cert.x).abs();
    for i in problem.constrained.iter() {
        residual = residual.max(cert.x[i].max(0.0));
        residual = residual.max((-cert.mu[i]).max(0.0));
        residual = residual.max((cert.mu[i] * cert.x[i]).abs());
    }
    for i in 0..n {
        let stationarity = 2.0 * cert.x[i] - 2.0 * problem.g[i] - cert.lambda + cert.mu[i];
        residual = residual.max(stationarity.abs());
    }
    Ok(residual)
}
