//! Seeded random instance generation.
//!
//! All randomness flows through ChaCha8 seeded from a `u64`, with
//! standard-normal draws, so fixtures reproduce byte-for-byte across
//! platforms. Matrix entries are drawn row-major, then the linear
//! coefficient.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::core_types::{IndexSet, QPProblem, SimplexPoint};
use crate::error::{Result, SolverError};
use crate::projection::ProjectionProblem;

/// Diagonal shift added to `A' A` for convex instances.
pub const CONVEX_SHIFT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Convex,
    Indefinite,
}

impl std::str::FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "convex" => Ok(ProblemKind::Convex),
            "indefinite" => Ok(ProblemKind::Indefinite),
            other => Err(format!("unknown kind `{other}`, expected convex or indefinite")),
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// Convex: `H = A'A + CONVEX_SHIFT * I` with `A` standard normal.
/// Indefinite: `H = (B + B') / 2` with `B` standard normal.
pub fn generate_problem(n: usize, kind: ProblemKind, seed: u64) -> Result<QPProblem> {
    if n == 0 {
        return Err(SolverError::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = DMatrix::from_fn(n, n, |_, _| normal(&mut rng));
    let hessian = match kind {
        ProblemKind::Convex => &raw.transpose() * &raw + DMatrix::identity(n, n) * CONVEX_SHIFT,
        ProblemKind::Indefinite => (&raw + raw.transpose()) * 0.5,
    };
    let linear: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    QPProblem::new(hessian, linear)
}

/// A Gaussian projection instance with `n_constrained` sign-constrained
/// positions sampled without replacement.
pub fn generate_projection(n: usize, n_constrained: usize, seed: u64) -> Result<ProjectionProblem> {
    if n == 0 {
        return Err(SolverError::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let constrained = sample(&mut rng, n, n_constrained.min(n)).into_vec();
    ProjectionProblem::new(g, IndexSet::new(constrained, n)?)
}

/// A random interior simplex point (exponential draws normalized);
/// with `with_zeros`, each coordinate is independently pinned to exact
/// zero with probability 1/3, keeping at least one free.
pub fn random_simplex_point(
    n: usize,
    with_zeros: bool,
    rng: &mut ChaCha8Rng,
) -> Result<SimplexPoint> {
    if n == 0 {
        return Err(SolverError::EmptyInput);
    }
    let mut raw: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().ln().max(1e-12)).collect();
    if with_zeros && n > 1 {
        let keep = rng.gen_range(0..n);
        for (i, x) in raw.iter_mut().enumerate() {
            if i != keep && rng.gen_range(0..3) == 0 {
                *x = 0.0;
            }
        }
    }
    let s: f64 = raw.iter().sum();
    SimplexPoint::new(raw.iter().map(|x| x / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = generate_problem(5, ProblemKind::Convex, 42).unwrap();
        let b = generate_problem(5, ProblemKind::Convex, 42).unwrap();
        assert_eq!(a.hessian(), b.hessian());
        assert_eq!(a.linear(), b.linear());
    }

    #[test]
    fn convex_minimum_eigenvalue_bounded_below() {
        for seed in 0..20u64 {
            let p = generate_problem(6, ProblemKind::Convex, seed).unwrap();
            let eig = p.hessian().clone().symmetric_eigen();
            let min = eig.eigenvalues.min();
            assert!(min >= CONVEX_SHIFT - 1e-9, "seed {seed}: {min}");
        }
    }

    #[test]
    fn indefinite_usually_has_negative_eigenvalue() {
        let mut negatives = 0;
        for seed in 0..100u64 {
            let p = generate_problem(6, ProblemKind::Indefinite, seed).unwrap();
            let eig = p.hessian().clone().symmetric_eigen();
            if eig.eigenvalues.min() < 0.0 {
                negatives += 1;
            }
        }
        assert!(negatives >= 95, "{negatives}/100");
    }

    #[test]
    fn projection_instances_reproducible() {
        let a = generate_projection(10, 4, 7).unwrap();
        let b = generate_projection(10, 4, 7).unwrap();
        assert_eq!(a.g(), b.g());
        assert_eq!(a.constrained(), b.constrained());
        assert_eq!(a.constrained().len(), 4);
    }
}
