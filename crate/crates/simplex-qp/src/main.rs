//! Command-line front end: solve, project, generate, oracle, bench.
//!
//! Exit codes: 0 on success (converged solve), 1 on input or usage
//! errors, 2 when the solver stops on the iteration cap.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use simplex_qp::core_types::{SimplexPoint, SolverConfig};
use simplex_qp::files::{ProblemFile, ProjectionInput, ProjectionOutput, SolutionFile};
use simplex_qp::generate::{generate_problem, generate_projection, ProblemKind};
use simplex_qp::oracle::{oracle_qp, DEFAULT_QP_GUARD};
use simplex_qp::projection::{project_partial_sign, verify_projection_kkt, ProjectionProblem};
use simplex_qp::solver::{solve, SolveStatus};
use simplex_qp::IndexSet;

#[derive(Parser)]
#[command(name = "simplex-qp", version, about = "Quadratic programs on the standard simplex")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve QP problem files.
    Solve(SolveArgs),
    /// Project a vector onto the zero-sum hyperplane with partial sign constraints.
    Project {
        /// JSON file with fields `g` and `constrained`.
        input: PathBuf,
        /// Write the result here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random problem file.
    Generate {
        #[arg(long)]
        n: usize,
        /// convex | indefinite
        #[arg(long, default_value = "convex")]
        kind: ProblemKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Accepted for interface compatibility; instances are dense.
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a problem file by brute-force active-set enumeration.
    Oracle {
        input: PathBuf,
        /// Largest dimension the enumeration will accept.
        #[arg(long, default_value_t = DEFAULT_QP_GUARD)]
        guard: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the partial-sign projection across input sizes.
    Bench {
        /// Comma-separated sizes, e.g. 1000,10000,100000.
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// One or more problem files.
    #[arg(required = true)]
    input: Vec<PathBuf>,
    /// Output path (single input only); defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output directory for batch solves (`<stem>.solution.json`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Record per-iteration diagnostics in the solution file.
    #[arg(long)]
    trace: bool,
    /// Solve batch inputs on this many threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Project { input, out } => cmd_project(&input, out.as_deref()),
        Command::Generate {
            n,
            kind,
            seed,
            density: _,
            out,
        } => cmd_generate(n, kind, seed, out.as_deref()),
        Command::Oracle { input, guard, out } => cmd_oracle(&input, guard, out.as_deref()),
        Command::Bench { sizes, reps, seed } => cmd_bench(&sizes, reps, seed),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32, String> {
    let config = SolverConfig {
        epsilon: args.epsilon.unwrap_or(1e-8),
        theta1: args.theta1.unwrap_or(std::f64::consts::PI / 18.0),
        theta2: args.theta2.unwrap_or(std::f64::consts::PI / 90.0),
        max_outer_iterations: args.max_iter,
        trace_enabled: args.trace,
        ..Default::default()
    };
    config.validate().map_err(|e| e.to_string())?;

    if args.input.len() == 1 {
        let solved = solve_one(&args.input[0], &config)?;
        emit(&solved.0, args.out.as_deref())?;
        return Ok(solved.1);
    }
    if args.out.is_some() {
        return Err("--out is for a single input; use --out-dir for batches".into());
    }
    let out_dir = args
        .out_dir
        .ok_or_else(|| "--out-dir is required for batch solves".to_string())?;
    fs::create_dir_all(&out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;

    let jobs = args.jobs.max(1);
    let inputs = &args.input;
    let config_ref = &config;
    let out_dir_ref = &out_dir;
    let results: Vec<Result<i32, String>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in inputs.chunks(inputs.len().div_ceil(jobs)) {
            handles.push(scope.spawn(move || {
                chunk
                    .iter()
                    .map(|path| {
                        let (text, code) = solve_one(path, config_ref)?;
                        let stem = path
                            .file_stem()
                            .map(|s| s.to_string_lossy().into_owned())
                            .unwrap_or_else(|| "problem".into());
                        let target = out_dir_ref.join(format!("{stem}.solution.json"));
                        fs::write(&target, text)
                            .map_err(|e| format!("{}: {e}", target.display()))?;
                        Ok(code)
                    })
                    .collect::<Vec<_>>()
            }));
        }
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });

    let mut worst = 0;
    for r in results {
        worst = worst.max(r?);
    }
    Ok(worst)
}

fn solve_one(path: &Path, config: &SolverConfig) -> Result<(String, i32), String> {
    let file: ProblemFile = read_json(path)?;
    let (problem, start) = file.into_problem().map_err(|e| e.to_string())?;
    let result = solve(&problem, &start, config).map_err(|e| e.to_string())?;
    let code = match result.status {
        SolveStatus::MaxIterations => 2,
        _ => 0,
    };
    let out = SolutionFile::from_result(&result, config, problem.dim());
    Ok((serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?, code))
}

fn cmd_project(input: &Path, out: Option<&Path>) -> Result<i32, String> {
    let file: ProjectionInput = read_json(input)?;
    let n = file.g.len();
    let constrained = IndexSet::new(file.constrained, n).map_err(|e| e.to_string())?;
    let problem = ProjectionProblem::new(file.g, constrained).map_err(|e| e.to_string())?;
    let cert = project_partial_sign(&problem).map_err(|e| e.to_string())?;
    let residual = verify_projection_kkt(&problem, &cert).map_err(|e| e.to_string())?;
    let output = ProjectionOutput::from_certificate(&cert, residual);
    emit(
        &serde_json::to_string_pretty(&output).map_err(|e| e.to_string())?,
        out,
    )?;
    Ok(0)
}

fn cmd_generate(n: usize, kind: ProblemKind, seed: u64, out: Option<&Path>) -> Result<i32, String> {
    let problem = generate_problem(n, kind, seed).map_err(|e| e.to_string())?;
    let file = ProblemFile::from_problem(&problem, None);
    emit(
        &serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?,
        out,
    )?;
    Ok(0)
}

fn cmd_oracle(input: &Path, guard: usize, out: Option<&Path>) -> Result<i32, String> {
    let file: ProblemFile = read_json(input)?;
    let (problem, _) = file.into_problem().map_err(|e| e.to_string())?;
    let solution = oracle_qp(&problem, guard).map_err(|e| e.to_string())?;
    let config = SolverConfig::default();
    let alpha = SimplexPoint::repaired(solution.x_or_alpha.clone()).map_err(|e| e.to_string())?;
    let file = SolutionFile {
        alpha: alpha.as_slice().to_vec(),
        objective: solution.objective,
        status: "oracle".into(),
        kkt_residual: solution.kkt_residual,
        iterations: 0,
        cg_invocations: 0,
        cg_rejections: 0,
        config: simplex_qp::files::ConfigEcho {
            epsilon: config.epsilon,
            theta1: config.theta1,
            theta2: config.theta2,
            max_outer_iterations: config.max_iterations_for(problem.dim()),
            cg_zero_tolerance: config.cg_zero_tolerance,
            active_tolerance: config.active_tolerance,
        },
        trace: None,
    };
    emit(
        &serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?,
        out,
    )?;
    Ok(0)
}

fn cmd_bench(sizes: &[usize], reps: usize, seed: u64) -> Result<i32, String> {
    println!("n\tmedian_seconds");
    for &n in sizes {
        let mut times = Vec::with_capacity(reps.max(1));
        for rep in 0..reps.max(1) {
            let problem = generate_projection(n, n / 2, seed.wrapping_add(rep as u64))
                .map_err(|e| e.to_string())?;
            let begin = Instant::now();
            let cert = project_partial_sign(&problem).map_err(|e| e.to_string())?;
            let elapsed = begin.elapsed().as_secs_f64();
            std::hint::black_box(&cert.x);
            times.push(elapsed);
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = times[times.len() / 2];
        println!("{n}\t{median}");
    }
    Ok(0)
}
