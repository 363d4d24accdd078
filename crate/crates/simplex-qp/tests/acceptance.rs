//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use nalgebra::{dmatrix, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplex_qp::cg::{constrained_cg, CgStatus, ReducedQP};
use simplex_qp::core_types::{dot, norm, sum, QPProblem, SimplexPoint, SolverConfig};
use simplex_qp::directions::compute_directions;
use simplex_qp::generate::{generate_problem, generate_projection, random_simplex_point, ProblemKind};
use simplex_qp::linesearch::max_feasible_step;
use simplex_qp::oracle::{oracle_project, oracle_qp, oracle_qp_candidates, DEFAULT_QP_GUARD};
use simplex_qp::projection::{project_partial_sign, verify_projection_kkt, ProjectionProblem};
use simplex_qp::solver::{solve, IterationRecord, SolveResult};

fn report(name: &str, outcome: Result<(), String>) {
    match outcome {
        Ok(()) => println!("PASS {name}"),
        Err(ref why) => println!("FAIL {name}: {why}"),
    }
    outcome.unwrap();
}

fn projection_instances() -> Vec<ProjectionProblem> {
    (0..1000u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=12usize);
            let g_size = rng.gen_range(0..=8usize.min(n));
            generate_projection(n, g_size, seed ^ 0x5eed).unwrap()
        })
        .collect()
}

#[test]
fn criterion_01_projection_oracle_equivalence() {
    let run = || -> Result<(), String> {
        let begin = Instant::now();
        for (k, problem) in projection_instances().iter().enumerate() {
            let cert = project_partial_sign(problem).map_err(|e| e.to_string())?;
            let oracle = oracle_project(problem).map_err(|e| e.to_string())?;
            let gap = cert
                .x
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if gap > 1e-9 {
                return Err(format!("instance {k}: max gap {gap}"));
            }
        }
        let elapsed = begin.elapsed().as_secs_f64();
        if elapsed >= 10.0 {
            return Err(format!("took {elapsed:.2}s, budget 10s"));
        }
        Ok(())
    };
    report("criterion 1: projection-oracle equivalence (1000 instances)", run());
}

/// Order property: larger g never maps to smaller x within any index
/// class where swapping two components preserves feasibility. That is
/// the constrained set, the free set, and the non-positive class; a
/// constrained zero against a free positive is exempt (the swap in the
/// exchange argument would violate the sign constraint).
fn lemma_order_violation(problem: &ProjectionProblem, x: &[f64]) -> Option<String> {
    let g = problem.g();
    let n = g.len();
    let constrained: Vec<usize> = problem.constrained().iter().collect();
    let free: Vec<usize> = (0..n).filter(|&i| !problem.constrained().contains(i)).collect();
    let nonpositive: Vec<usize> = (0..n).filter(|&i| x[i] <= 0.0).collect();
    for members in [&constrained, &free, &nonpositive] {
        for &i in members.iter() {
            for &j in members.iter() {
                if g[i] > g[j] && x[i] < x[j] - 1e-12 {
                    return Some(format!(
                        "g[{i}]={} > g[{j}]={} but x[{i}]={} < x[{j}]={}",
                        g[i], g[j], x[i], x[j]
                    ));
                }
            }
        }
    }
    None
}

#[test]
fn criterion_02_projection_kkt_suite() {
    let run = || -> Result<(), String> {
        for (k, problem) in projection_instances().iter().enumerate() {
            let cert = project_partial_sign(problem).map_err(|e| e.to_string())?;
            let residual = verify_projection_kkt(problem, &cert).map_err(|e| e.to_string())?;
            if residual > 1e-10 {
                return Err(format!("instance {k}: kkt residual {residual}"));
            }
            for i in problem.constrained().iter() {
                if (cert.mu[i] * cert.x[i]).abs() > 1e-10 {
                    return Err(format!("instance {k}: complementary slackness broken at {i}"));
                }
            }
            if let Some(why) = lemma_order_violation(problem, &cert.x) {
                return Err(format!("instance {k}: order property: {why}"));
            }
        }
        Ok(())
    };
    report("criterion 2: projection KKT + order property (1000 instances)", run());
}

#[test]
fn criterion_03_projection_complexity() {
    let run = || -> Result<(), String> {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_simplex-qp"))
            .args(["bench", "--sizes", "100000,1000000", "--reps", "5"])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("bench exited with {:?}", out.status.code()));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let mut medians = std::collections::HashMap::new();
        for line in text.lines().skip(1) {
            let mut parts = line.split('\t');
            let n: usize = parts.next().unwrap().parse().map_err(|_| line.to_string())?;
            let t: f64 = parts.next().unwrap().parse().map_err(|_| line.to_string())?;
            medians.insert(n, t);
        }
        let small = medians[&100_000];
        let large = medians[&1_000_000];
        if large > 1.0 {
            return Err(format!("n=1e6 median {large}s exceeds 1s"));
        }
        if large / small > 25.0 {
            return Err(format!(
                "growth ratio {} exceeds 25 (t(1e6)={large}, t(1e5)={small})",
                large / small
            ));
        }
        Ok(())
    };
    report("criterion 3: O(n log n) scaling via cmd_bench", run());
}

#[test]
fn criterion_04_cg_correctness() {
    let run = || -> Result<(), String> {
        for seed in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = rng.gen_range(1..=30usize);
            // Well conditioned by construction: in floating point the
            // m-step termination of conjugate gradients only survives
            // when orthogonality loss stays small.
            let a = DMatrix::from_fn(m, m, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let h = &a * a.transpose() / m as f64 + DMatrix::identity(m, m);
            let c: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();

            // Direct equality-constrained KKT solve, the independent route.
            let mut kkt = DMatrix::zeros(m + 1, m + 1);
            kkt.view_mut((0, 0), (m, m)).copy_from(&h);
            for i in 0..m {
                kkt[(i, m)] = -1.0;
                kkt[(m, i)] = 1.0;
            }
            let mut rhs = DVector::zeros(m + 1);
            for i in 0..m {
                rhs[i] = c[i];
            }
            rhs[m] = 1.0;
            let direct = kkt.lu().solve(&rhs).ok_or("singular KKT system")?;

            let reduced = ReducedQP::standalone(h, c).map_err(|e| e.to_string())?;
            let start = vec![1.0 / m as f64; m];
            let out = constrained_cg(&reduced, &start, 1e-14).map_err(|e| e.to_string())?;
            if out.status != CgStatus::Converged {
                return Err(format!("seed {seed}: status {:?}", out.status));
            }
            if out.iterations > m {
                return Err(format!("seed {seed}: {} iterations > m={m}", out.iterations));
            }
            for (i, (cg, dk)) in out.alpha_reduced.iter().zip(direct.iter()).enumerate() {
                if (cg - dk).abs() > 1e-6 {
                    return Err(format!("seed {seed}: component {i} gap {}", (cg - dk).abs()));
                }
            }
            for (k, it) in out.iterates.iter().enumerate() {
                if it.sum_g.abs() > 1e-8 * it.norm_g.max(1.0) {
                    return Err(format!("seed {seed} iter {k}: e'g = {}", it.sum_g));
                }
                if it.sum_p.abs() > 1e-8 * it.norm_p.max(1.0) {
                    return Err(format!("seed {seed} iter {k}: e'p = {}", it.sum_p));
                }
                if (it.t - it.residual_identity).abs() > 1e-8 * it.t.abs().max(1.0) {
                    return Err(format!(
                        "seed {seed} iter {k}: t={} vs sum((r_i-r_1)^2)={}",
                        it.t, it.residual_identity
                    ));
                }
            }
        }
        Ok(())
    };
    report("criterion 4: constrained CG vs direct KKT solve (200 instances)", run());
}

fn solve_traced(problem: &QPProblem, seed: u64) -> SolveResult {
    let n = problem.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
    let start = random_simplex_point(n, false, &mut rng).unwrap();
    let config = SolverConfig {
        trace_enabled: true,
        ..Default::default()
    };
    solve(problem, &start, &config).unwrap()
}

#[test]
fn criterion_05_solver_vs_oracle_convex() {
    let run = || -> Result<(), String> {
        let begin = Instant::now();
        for seed in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..=10usize);
            let problem = generate_problem(n, ProblemKind::Convex, seed).unwrap();
            let result = solve_traced(&problem, seed);
            let oracle = oracle_qp(&problem, DEFAULT_QP_GUARD).map_err(|e| e.to_string())?;
            if (result.objective - oracle.objective).abs() > 1e-8 {
                return Err(format!(
                    "seed {seed}: objective {} vs oracle {} (status {:?})",
                    result.objective, oracle.objective, result.status
                ));
            }
            if result.kkt_residual > 1e-6 {
                return Err(format!("seed {seed}: kkt residual {}", result.kkt_residual));
            }
        }
        let elapsed = begin.elapsed().as_secs_f64();
        if elapsed >= 30.0 {
            return Err(format!("took {elapsed:.2}s, budget 30s"));
        }
        Ok(())
    };
    report("criterion 5: solver matches oracle on convex QPs (200 instances)", run());
}

#[test]
fn criterion_06_solver_stationarity_indefinite() {
    let run = || -> Result<(), String> {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..=10usize);
            let problem = generate_problem(n, ProblemKind::Indefinite, seed).unwrap();
            let result = solve_traced(&problem, seed);
            if result.kkt_residual > 1e-6 {
                return Err(format!("seed {seed}: kkt residual {}", result.kkt_residual));
            }
            let candidates =
                oracle_qp_candidates(&problem, DEFAULT_QP_GUARD).map_err(|e| e.to_string())?;
            let near = candidates
                .iter()
                .any(|c| (c.objective - result.objective).abs() <= 1e-6);
            if !near {
                return Err(format!(
                    "seed {seed}: objective {} matches no KKT candidate",
                    result.objective
                ));
            }
        }
        Ok(())
    };
    report(
        "criterion 6: indefinite solves land on a KKT candidate (100 instances)",
        run(),
    );
}

fn traced_solves() -> Vec<(usize, SolveResult)> {
    let mut out = Vec::new();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=10usize);
        let kind = if seed % 2 == 0 {
            ProblemKind::Convex
        } else {
            ProblemKind::Indefinite
        };
        let problem = generate_problem(n, kind, seed).unwrap();
        out.push((n, solve_traced(&problem, seed)));
    }
    out
}

#[test]
fn criterion_07_trace_invariants() {
    let run = || -> Result<(), String> {
        let theta2 = SolverConfig::default().theta2;
        for (case, (n, result)) in traced_solves().iter().enumerate() {
            let trace: &[IterationRecord] = result.trace.as_deref().unwrap();
            let mut prev = f64::INFINITY;
            let mut rejected_pending = false;
            for rec in trace {
                if rec.objective > prev + 1e-12 * prev.abs().max(1.0) {
                    return Err(format!(
                        "case {case}: objective rose from {prev} to {} at iteration {}",
                        rec.objective, rec.iteration
                    ));
                }
                prev = rec.objective;
                if rec.stable_count == 0 {
                    rejected_pending = false;
                }
                if rec.event.is_some() {
                    if !(rec.cg_allowed && rec.stable_count > *n && rec.gate_angle < theta2) {
                        return Err(format!(
                            "case {case}: CG fired without its precondition at iteration {}",
                            rec.iteration
                        ));
                    }
                    if rejected_pending {
                        return Err(format!(
                            "case {case}: second CG attempt on a rejected working set at iteration {}",
                            rec.iteration
                        ));
                    }
                    if matches!(rec.event, Some(simplex_qp::solver::CgEvent::Rejected)) {
                        rejected_pending = true;
                    }
                }
            }
        }
        Ok(())
    };
    report("criterion 7: trace invariants (descent, CG gate, single attempt)", run());
}

#[test]
fn criterion_08_trace_feasibility() {
    let run = || -> Result<(), String> {
        for (case, (_, result)) in traced_solves().iter().enumerate() {
            for rec in result.trace.as_deref().unwrap() {
                let s = sum(&rec.alpha);
                if (s - 1.0).abs() > 1e-12 {
                    return Err(format!("case {case} iter {}: sum {}", rec.iteration, s));
                }
                if rec.alpha.iter().any(|&x| x < 0.0) {
                    return Err(format!("case {case} iter {}: negative component", rec.iteration));
                }
                let zeros = rec.alpha.iter().filter(|&&x| x == 0.0).count();
                if zeros != rec.working_set_size {
                    return Err(format!(
                        "case {case} iter {}: {zeros} exact zeros but working set size {}",
                        rec.iteration, rec.working_set_size
                    ));
                }
            }
        }
        Ok(())
    };
    report("criterion 8: every traced iterate is a valid simplex point", run());
}

#[test]
fn criterion_09_descent_identity() {
    let run = || -> Result<(), String> {
        for seed in 0..500u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(5));
            let n = rng.gen_range(2..=12usize);
            let kind = if seed % 2 == 0 {
                ProblemKind::Convex
            } else {
                ProblemKind::Indefinite
            };
            let problem = generate_problem(n, kind, seed).unwrap();
            let alpha = random_simplex_point(n, true, &mut rng).unwrap();
            let working = alpha.zero_indices(0.0);
            let d = problem.gradient(&alpha).unwrap();
            let pair = compute_directions(&d, &working, &alpha).map_err(|e| e.to_string())?;
            for (label, dir) in [("reduced", &pair.reduced), ("projected", &pair.projected)] {
                let sq = dot(dir, dir);
                if (dot(&d, dir) - sq).abs() > 1e-8 * sq.max(1.0) {
                    return Err(format!("seed {seed} {label}: <d,g~> != ||g~||^2"));
                }
                if norm(dir) > 0.0 && !(max_feasible_step(&alpha, dir) > 0.0) {
                    return Err(format!("seed {seed} {label}: u_max is not positive"));
                }
            }
        }
        Ok(())
    };
    report("criterion 9: descent identity and positive u_max (500 states)", run());
}

#[test]
fn criterion_10_known_closed_forms() {
    let run = || -> Result<(), String> {
        let h = dmatrix![1.0, 0.0; 0.0, 100.0];
        let problem = QPProblem::new(h, vec![0.0, 0.0]).unwrap();
        let start = SimplexPoint::uniform(2).unwrap();
        let result = solve(&problem, &start, &SolverConfig::default()).unwrap();
        let expected = [100.0 / 101.0, 1.0 / 101.0];
        for (a, e) in result.alpha.as_slice().iter().zip(&expected) {
            if (a - e).abs() > 1e-6 {
                return Err(format!("diag(1,100): got {:?}", result.alpha.as_slice()));
            }
        }

        let h = dmatrix![0.0, 1.0; 1.0, 0.0];
        let problem = QPProblem::new(h, vec![0.0, 0.0]).unwrap();
        // (0.5, 0.5) is excluded: it is the exact maximizer, a
        // stationary point no descent method leaves.
        for start in [vec![0.4, 0.6], vec![0.55, 0.45], vec![0.9, 0.1]] {
            let start = SimplexPoint::new(start).unwrap();
            let result = solve(&problem, &start, &SolverConfig::default()).unwrap();
            if result.objective.abs() > 1e-8 {
                return Err(format!(
                    "offdiagonal from {:?}: objective {}",
                    start.as_slice(),
                    result.objective
                ));
            }
        }
        Ok(())
    };
    report("criterion 10: known closed forms", run());
}
