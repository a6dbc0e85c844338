use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use armijo_core::bounds::{
    classical_iteration_bound, eia_complexity_bound_symbolic, eia_eval_factor, eia_step_lower_bound,
    evals_per_iter_memory, memory_armijo_iteration_bound, BoundInputs,
};
use armijo_core::output::{sweep_csv, trace_csv, SweepRow};
use armijo_core::problems::{problem_by_name, PROBLEM_NAMES};
use armijo_core::suite::{filter_names, run_suite};
use armijo_core::verify::{sample_points, SAMPLE_BOX};
use armijo_core::{
    run, ClipSchedule, Error, LineSearchConfig, OptimizerConfig, OptimizerKind, Point, Problem, Termination,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;
const EXIT_NON_FINITE: u8 = 4;

#[derive(Parser)]
#[command(name = "armijo", version, about = "Armijo line-search experiments and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimizer on one problem.
    Run(RunArgs),
    /// Run once per tolerance and compare iteration counts with the bound.
    SweepEps(SweepArgs),
    /// Run the acceptance suite and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// One of quadratic, cosh, nesterov, doublewell, rosenbrock.
    #[arg(long)]
    problem: String,
    #[arg(long)]
    dim: Option<usize>,
    /// Diagonal of the quadratic, comma separated.
    #[arg(long, value_delimiter = ',')]
    diag: Option<Vec<f64>>,
    #[arg(long, default_value = "memory-armijo")]
    optimizer: OptimizerKind,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    f1: f64,
    #[arg(long, default_value_t = 2.0)]
    f2: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_init: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 200)]
    max_backtracks: usize,
    #[arg(long, default_value_t = 1e12)]
    eta_max: f64,
    #[arg(long)]
    gd_eta: Option<f64>,
    #[arg(long)]
    clip_eta: Option<f64>,
    #[arg(long)]
    clip_gamma: Option<f64>,
    /// Fill clip-eta and clip-gamma from the problem's (L0, L1).
    #[arg(long)]
    clip_schedule: Option<Schedule>,
    /// `ones`, `zeros`, `random` (uniform in [-2, 2] from --seed), or a
    /// comma-separated list.
    #[arg(long, default_value = "ones", allow_hyphen_values = true)]
    theta0: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Schedule {
    Standard,
    Refined,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value = "trace.csv")]
    trace_out: PathBuf,
    #[arg(long, default_value = "summary.json")]
    summary_out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    eps_list: Vec<f64>,
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    /// Number of pieces for the EIA bound (needs --phi-value).
    #[arg(long)]
    s_tilde: Option<u32>,
    /// Desingularizing function value for the EIA bound (needs --s-tilde).
    #[arg(long)]
    phi_value: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "verification.json")]
    out: PathBuf,
    /// Criterion key, `c<id>`, or audit name.
    #[arg(long)]
    only: Option<String>,
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonFiniteValue(_) => EXIT_NON_FINITE,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::SweepEps(a) => cmd_sweep(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

struct Resolved {
    problem: Problem,
    theta0: Point,
    kind: OptimizerKind,
    cfg: OptimizerConfig,
}

fn resolve(spec: &SpecArgs) -> Result<Resolved, Failure> {
    if !PROBLEM_NAMES.contains(&spec.problem.as_str()) {
        return Err(Failure::usage(format!(
            "unknown problem {:?}; expected one of {}",
            spec.problem,
            PROBLEM_NAMES.join(", ")
        )));
    }
    let problem = problem_by_name(&spec.problem, spec.dim, spec.diag.as_deref())?;
    let dim = problem.dim();
    let theta0 = match spec.theta0.as_str() {
        "ones" => Point::ones(dim)?,
        "zeros" => Point::zeros(dim)?,
        "random" => sample_points(dim, 1, SAMPLE_BOX, spec.seed).remove(0),
        list => {
            let coords = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::usage(format!("bad --theta0 {list:?}: {e}")))?;
            if coords.len() != dim {
                return Err(Failure::usage(format!(
                    "--theta0 has {} entries, problem has dim {dim}",
                    coords.len()
                )));
            }
            Point::new(coords)?
        }
    };
    let linesearch = LineSearchConfig {
        lambda: spec.lambda,
        f1: spec.f1,
        f2: spec.f2,
        eta_init: spec.eta_init,
        eps: spec.eps,
        max_backtracks: spec.max_backtracks,
        eta_max: spec.eta_max,
    };
    let mut cfg = OptimizerConfig::armijo(linesearch, spec.max_iter);
    cfg.gd_eta = spec.gd_eta;
    cfg.clip_eta = spec.clip_eta;
    cfg.clip_gamma = spec.clip_gamma;
    if let Some(schedule) = spec.clip_schedule {
        let known = problem.known();
        let (l0, l1) = known.l0.zip(known.l1).ok_or_else(|| {
            Failure::usage(format!("--clip-schedule needs known (L0, L1) for {}", problem.name()))
        })?;
        let s = match schedule {
            Schedule::Standard => ClipSchedule::standard(l0, l1)?,
            Schedule::Refined => ClipSchedule::refined(l0, l1)?,
        };
        cfg.clip_eta = cfg.clip_eta.or(Some(s.eta));
        cfg.clip_gamma = cfg.clip_gamma.or(Some(s.gamma));
    }
    cfg.validate_for(spec.optimizer)?;
    Ok(Resolved { problem, theta0, kind: spec.optimizer, cfg })
}

fn exit_code(t: Termination) -> u8 {
    match t {
        Termination::GradBelowEps | Termination::AverageGradBelowTarget => 0,
        Termination::MaxIter => 2,
        Termination::StepUnderflow => 3,
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_run(a: &RunArgs) -> Result<u8, Failure> {
    let r = resolve(&a.spec)?;
    let trace = run(r.kind, &r.problem, &r.theta0, &r.cfg)?;
    write(&a.trace_out, &trace_csv(&trace))?;
    write(&a.summary_out, &to_json(&trace.summary()))?;
    Ok(exit_code(trace.terminated_by))
}

fn cmd_sweep(a: &SweepArgs) -> Result<u8, Failure> {
    if !a.spec.optimizer.is_armijo_family() {
        return Err(Failure::usage("sweep-eps needs --optimizer memory-armijo or eia"));
    }
    if a.eps_list.is_empty() {
        return Err(Failure::usage("--eps-list is empty"));
    }
    if a.s_tilde.is_some() != a.phi_value.is_some() {
        return Err(Failure::usage("--s-tilde and --phi-value go together"));
    }
    let specs = a
        .eps_list
        .iter()
        .map(|&eps| resolve(&SpecArgs { eps, ..a.spec.clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = specs.par_iter().map(|r| sweep_row(r, a)).collect::<Result<Vec<_>, Failure>>()?;
    write(&a.out, &sweep_csv(&rows))?;
    Ok(0)
}

fn sweep_row(r: &Resolved, a: &SweepArgs) -> Result<SweepRow, Failure> {
    let trace = run(r.kind, &r.problem, &r.theta0, &r.cfg)?;
    let counters = trace.counters();
    let ls = &r.cfg.linesearch;
    let bound = sweep_bound(r, a).ok();
    let factor = match r.kind {
        OptimizerKind::Eia => eia_eval_factor(ls.f1, ls.f2).ok(),
        _ => evals_per_iter_memory(ls.f1, ls.f2).ok().map(|e| e + 1.0),
    };
    Ok(SweepRow {
        eps: ls.eps,
        iterations: trace.iterations(),
        bound,
        func_evals: counters.func_evals,
        grad_evals: counters.grad_evals,
        bound_evals: bound.zip(factor).map(|(b, f)| b * f),
    })
}

fn sweep_bound(r: &Resolved, a: &SweepArgs) -> Result<f64, Error> {
    let known = r.problem.known();
    let missing = |what: &str| Error::Inapplicable(format!("{what} unknown for {}", r.problem.name()));
    let r_star = known.r_star.ok_or_else(|| missing("R*"))?;
    let ls = &r.cfg.linesearch;
    let delta = r.problem.value(&r.theta0) - r_star;
    let mut b = BoundInputs::new(known.l0.unwrap_or(0.0), known.l1.unwrap_or(0.0), delta, ls.eps);
    b.l = known.lipschitz;
    b.lambda = ls.lambda;
    b.f1 = ls.f1;
    b.f2 = ls.f2;
    match r.kind {
        OptimizerKind::Eia => {
            let (s, phi) = a.s_tilde.zip(a.phi_value).ok_or_else(|| missing("EIA bound constants"))?;
            let eta_star = eia_step_lower_bound(&b)?;
            eia_complexity_bound_symbolic(eta_star, delta, ls.eps, ls.lambda, s, phi)
        }
        _ => {
            known.l0.zip(known.l1).ok_or_else(|| missing("(L0, L1)"))?;
            if b.l1 > 0.0 {
                memory_armijo_iteration_bound(&b)
            } else {
                classical_iteration_bound(&b)
            }
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Failure> {
    if let Some(f) = &a.only {
        if !filter_names().contains(f) {
            return Err(Failure::usage(format!(
                "unknown --only {f:?}; expected one of {}",
                filter_names().join(", ")
            )));
        }
    }
    let report = run_suite(a.only.as_deref())?;
    write(&a.out, &to_json(&report))?;
    for c in &report.criteria {
        println!("{:>2} {:<24} {}", c.id, c.key, if c.passed { "PASS" } else { "FAIL" });
    }
    Ok(if report.pass { 0 } else { 1 })
}
