//! Shared problem data types and their feasibility invariants.

use nalgebra::DMatrix;

use crate::error::{Result, SolverError};

/// Tolerance on the simplex sum constraint.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Components below this magnitude (in absolute value) are repaired to
/// exact zero when loading a start vector; anything worse is rejected.
pub const REPAIR_TOLERANCE: f64 = 1e-8;

pub fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SolverError::NonFinite(what))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sum(a: &[f64]) -> f64 {
    a.iter().sum()
}

/// A strictly ascending set of 0-based positions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary order, rejecting duplicates and
    /// indices `>= len`.
    pub fn new(mut indices: Vec<usize>, len: usize) -> Result<Self> {
        indices.sort_unstable();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(SolverError::DuplicateIndex(pair[0]));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= len {
                return Err(SolverError::IndexOutOfRange { index: last, len });
            }
        }
        Ok(Self { indices })
    }

    /// Builds from an already strictly ascending, in-range sequence.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Members of `self` not in `other`.
    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet::from_sorted_unchecked(
            self.indices
                .iter()
                .copied()
                .filter(|&i| !other.contains(i))
                .collect(),
        )
    }

    /// Indices in `0..n` not in `self`.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet::from_sorted_unchecked((0..n).filter(|&i| !self.contains(i)).collect())
    }
}

/// A quadratic program `q(alpha) = 1/2 alpha' H alpha - alpha' c` on the
/// standard simplex. `H` is symmetrized on construction and is not
/// required to be positive semidefinite.
#[derive(Debug, Clone)]
pub struct QPProblem {
    hessian: DMatrix<f64>,
    linear: Vec<f64>,
}

impl QPProblem {
    pub fn new(hessian: DMatrix<f64>, linear: Vec<f64>) -> Result<Self> {
        let n = linear.len();
        if n == 0 {
            return Err(SolverError::EmptyInput);
        }
        if hessian.nrows() != n || hessian.ncols() != n {
            return Err(SolverError::DimensionMismatch {
                what: "hessian",
                expected: n * n,
                found: hessian.nrows() * hessian.ncols(),
            });
        }
        check_finite(hessian.as_slice(), "hessian")?;
        check_finite(&linear, "linear coefficient")?;
        // Symmetrize: file input may carry rounding asymmetry.
        let hessian = (&hessian + hessian.transpose()) * 0.5;
        Ok(Self { hessian, linear })
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

    /// `1/2 alpha' H alpha - alpha' c` at a raw point.
    pub fn objective_at(&self, alpha: &[f64]) -> f64 {
        debug_assert_eq!(alpha.len(), self.dim());
        let h_alpha = self.multiply_hessian(alpha);
        0.5 * dot(alpha, &h_alpha) - dot(alpha, &self.linear)
    }

    /// `H alpha - c` at a raw point.
    pub fn gradient_at(&self, alpha: &[f64]) -> Vec<f64> {
        debug_assert_eq!(alpha.len(), self.dim());
        let mut g = self.multiply_hessian(alpha);
        for (gi, ci) in g.iter_mut().zip(&self.linear) {
            *gi -= ci;
        }
        g
    }

    pub fn objective(&self, point: &SimplexPoint) -> Result<f64> {
        self.check_dim(point)?;
        Ok(self.objective_at(point.as_slice()))
    }

    pub fn gradient(&self, point: &SimplexPoint) -> Result<Vec<f64>> {
        self.check_dim(point)?;
        Ok(self.gradient_at(point.as_slice()))
    }

    fn check_dim(&self, point: &SimplexPoint) -> Result<()> {
        if point.len() != self.dim() {
            return Err(SolverError::DimensionMismatch {
                what: "point",
                expected: self.dim(),
                found: point.len(),
            });
        }
        Ok(())
    }

    fn multiply_hessian(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = self.hessian.row(i);
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

/// A point on the standard simplex: nonnegative components (boundary
/// coordinates held at exact zero) summing to one within `SUM_TOLERANCE`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    alpha: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(SolverError::EmptyInput);
        }
        check_finite(&alpha, "simplex point")?;
        if let Some(bad) = alpha.iter().find(|&&x| x < 0.0) {
            return Err(SolverError::InvalidSimplexPoint(format!(
                "negative component {bad}"
            )));
        }
        let s = sum(&alpha);
        if (s - 1.0).abs() > SUM_TOLERANCE {
            return Err(SolverError::InvalidSimplexPoint(format!(
                "component sum {s} not within {SUM_TOLERANCE} of 1"
            )));
        }
        Ok(Self { alpha })
    }

    /// Deterministic repair of a nearly-feasible vector: components in
    /// `[-REPAIR_TOLERANCE, 0)` are clamped to exact zero and the vector
    /// is rescaled when its sum is within `REPAIR_TOLERANCE` of one.
    /// Anything outside those bands is rejected.
    pub fn repaired(mut alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(SolverError::EmptyInput);
        }
        check_finite(&alpha, "simplex point")?;
        for x in alpha.iter_mut() {
            if *x < 0.0 {
                if *x < -REPAIR_TOLERANCE {
                    return Err(SolverError::InvalidSimplexPoint(format!(
                        "component {x} below -{REPAIR_TOLERANCE}"
                    )));
                }
                *x = 0.0;
            }
        }
        let s = sum(&alpha);
        if (s - 1.0).abs() > REPAIR_TOLERANCE {
            return Err(SolverError::InvalidSimplexPoint(format!(
                "component sum {s} not within {REPAIR_TOLERANCE} of 1"
            )));
        }
        if (s - 1.0).abs() > SUM_TOLERANCE {
            for x in alpha.iter_mut() {
                *x /= s;
            }
        }
        Self::new(alpha)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SolverError::EmptyInput);
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.alpha
    }

    /// Indices with `alpha_i <= tolerance`; the default convention is
    /// `tolerance = 0`, i.e. exact-zero membership.
    pub fn zero_indices(&self, tolerance: f64) -> IndexSet {
        IndexSet::from_sorted_unchecked(
            self.alpha
                .iter()
                .enumerate()
                .filter(|(_, &x)| x <= tolerance)
                .map(|(i, _)| i)
                .collect(),
        )
    }
}

/// Parameters of the active-set driver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Convergence tolerance on the projected gradient norm.
    pub epsilon: f64,
    /// Angle threshold (radians) for choosing the reduced direction.
    pub theta1: f64,
    /// Angle threshold (radians) for switching to conjugate gradient.
    pub theta2: f64,
    /// Outer iteration cap; `None` resolves to `10 * n + 1000`.
    pub max_outer_iterations: Option<usize>,
    /// Relative tolerance treated as zero inside conjugate gradient.
    pub cg_zero_tolerance: f64,
    /// Active-set membership tolerance (0 means exact-zero comparison).
    pub active_tolerance: f64,
    /// Record per-iteration diagnostics.
    pub trace_enabled: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            theta1: std::f64::consts::PI / 18.0,
            theta2: std::f64::consts::PI / 90.0,
            max_outer_iterations: None,
            cg_zero_tolerance: 1e-14,
            active_tolerance: 0.0,
            trace_enabled: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.theta2 > 0.0 && self.theta2 <= self.theta1 && self.theta1 < std::f64::consts::PI)
        {
            return Err(SolverError::InvalidConfig(format!(
                "need 0 < theta2 <= theta1 < pi, got theta1={}, theta2={}",
                self.theta1, self.theta2
            )));
        }
        if !(self.cg_zero_tolerance >= 0.0) {
            return Err(SolverError::InvalidConfig(
                "cg_zero_tolerance must be nonnegative".into(),
            ));
        }
        if !(self.active_tolerance >= 0.0) {
            return Err(SolverError::InvalidConfig(
                "active_tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn max_iterations_for(&self, n: usize) -> usize {
        self.max_outer_iterations.unwrap_or(10 * n + 1000)
    }
}
