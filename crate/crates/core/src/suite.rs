//! The verification suite: every acceptance criterion as a runnable check,
//! aggregated into one serializable report.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::{
    admissible_step_tilde_eta, asymptotic_equiv, clipping_bounds, eia_step_lower_bound, gd_bounds,
    h_threshold, memory_armijo_grad_eval_bound, memory_armijo_iteration_bound, BoundInputs, BoundReport,
    Measured,
};
use crate::error::{Error, Result};
use crate::linesearch::{eia_step, memory_armijo_step, LineSearchConfig};
use crate::optimizers::{
    run_clipped_gd, run_eia, run_memory_armijo, ClipSchedule, ClipStop, OptimizerConfig,
};
use crate::point::Point;
use crate::problems::{
    make_cosh_sum, make_double_well, make_nesterov_worst, make_quadratic, make_rosenbrock, Problem,
};
use crate::trace::{EvalCounters, RunTrace, Termination};
use crate::verify::{
    audit_armijo_descent, audit_descent_inequality, audit_finite_diff, audit_gradient_growth, audit_h_lemma,
    audit_iteration_bound, audit_o_small_decay, audit_semi_implicit, audit_step_floor, sample_pairs,
    sample_points, AuditReport, SAMPLE_BOX,
};

/// Seeds for the sampled audits.
pub const PAIR_SEED: u64 = 20_240_501;
pub const H_SEED: u64 = 20_240_502;
pub const FD_SEED: u64 = 20_240_503;

pub const SWEEP_EPS: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const MAX_RUN_TIME: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub key: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub audits: Vec<AuditReport>,
    pub bounds: Vec<BoundReport>,
    pub criteria: Vec<CriterionOutcome>,
    /// Measurements reported for information only.
    #[serde(default)]
    pub info: Vec<String>,
    pub pass: bool,
}

#[derive(Default)]
struct Collect {
    audits: Vec<AuditReport>,
    bounds: Vec<BoundReport>,
    info: Vec<String>,
}

struct Criterion {
    id: u8,
    key: &'static str,
    audits: &'static [&'static str],
    run: fn(&mut Collect) -> Result<(bool, String)>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, key: "iteration_bound", audits: &["audit_iteration_bound"], run: c1_iteration_bound },
    Criterion { id: 2, key: "asymptotic_equivalent", audits: &[], run: c2_asymptotic },
    Criterion {
        id: 3,
        key: "descent_invariant",
        audits: &["audit_armijo_descent", "audit_semi_implicit"],
        run: c3_descent,
    },
    Criterion { id: 4, key: "eia_step_floor", audits: &["audit_step_floor"], run: c4_step_floor },
    Criterion {
        id: 5,
        key: "smoothness_lemmas",
        audits: &["audit_gradient_growth", "audit_descent_inequality"],
        run: c5_lemmas,
    },
    Criterion { id: 6, key: "h_function", audits: &["audit_h_lemma"], run: c6_h_lemma },
    Criterion { id: 7, key: "clipped_gd_average", audits: &[], run: c7_clipping },
    Criterion { id: 8, key: "o_small_decay", audits: &["audit_o_small_decay"], run: c8_o_small },
    Criterion { id: 9, key: "gradient_correctness", audits: &["audit_finite_diff"], run: c9_finite_diff },
    Criterion { id: 10, key: "evaluation_accounting", audits: &[], run: c10_accounting },
    Criterion { id: 11, key: "bound_oracles", audits: &[], run: c11_bound_values },
];

/// Keys accepted by [`run_suite`]'s filter: criterion keys, `c<id>`, and
/// audit names.
pub fn filter_names() -> Vec<String> {
    let mut names: Vec<String> = CRITERIA.iter().map(|c| c.key.to_string()).collect();
    names.extend(CRITERIA.iter().map(|c| format!("c{}", c.id)));
    names.extend(CRITERIA.iter().flat_map(|c| c.audits.iter().map(|a| a.to_string())));
    names
}

/// Runs every criterion, or only the ones matching `only`.
pub fn run_suite(only: Option<&str>) -> Result<SuiteReport> {
    let selected: Vec<&Criterion> = CRITERIA
        .iter()
        .filter(|c| match only {
            None => true,
            Some(f) => c.key == f || format!("c{}", c.id) == f || c.audits.contains(&f),
        })
        .collect();
    if selected.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no criterion or audit named {:?}",
            only.unwrap_or_default()
        )));
    }
    let mut col = Collect::default();
    let mut criteria = Vec::new();
    for c in selected {
        let (passed, detail) = match (c.run)(&mut col) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        criteria.push(CriterionOutcome { id: c.id, key: c.key.to_string(), passed, detail });
    }
    if let Some(f) = only {
        if CRITERIA.iter().any(|c| c.audits.contains(&f)) {
            col.audits.retain(|a| a.name == f);
        }
    }
    let pass = criteria.iter().all(|c| c.passed);
    Ok(SuiteReport { audits: col.audits, bounds: col.bounds, criteria, info: col.info, pass })
}

/// Runs a single criterion by id.
pub fn run_criterion(id: u8) -> Result<CriterionOutcome> {
    run_suite(Some(&format!("c{id}")))?
        .criteria
        .pop()
        .ok_or_else(|| Error::InvalidInput(format!("no criterion {id}")))
}

fn armijo_cfg(eps: f64, max_iter: usize) -> OptimizerConfig {
    OptimizerConfig::armijo(
        LineSearchConfig { lambda: 0.5, f1: 2.0, f2: 2.0, eta_init: 1.0, eps, ..LineSearchConfig::default() },
        max_iter,
    )
}

fn gap(problem: &Problem, theta0: &Point) -> f64 {
    problem.value(theta0) - problem.known().r_star.expect("suite problems know R*")
}

struct CoshRun {
    dim: usize,
    eps: f64,
    bound: f64,
    trace: RunTrace,
    elapsed: Duration,
}

fn cosh_bound_runs() -> Result<Vec<CoshRun>> {
    let mut runs = Vec::new();
    for dim in [1usize, 10] {
        let p = make_cosh_sum(dim)?;
        let theta0 = Point::ones(dim)?;
        for eps in SWEEP_EPS {
            let b = BoundInputs::new(1.0, 1.0, gap(&p, &theta0), eps);
            let bound = memory_armijo_iteration_bound(&b)?;
            let max_iter = bound.ceil() as usize + 1;
            let start = Instant::now();
            let trace = run_memory_armijo(&p, &theta0, &armijo_cfg(eps, max_iter))?;
            runs.push(CoshRun { dim, eps, bound, trace, elapsed: start.elapsed() });
        }
    }
    Ok(runs)
}

fn c1_iteration_bound(col: &mut Collect) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in cosh_bound_runs()? {
        let audit = audit_iteration_bound(&run.trace, run.bound)
            .unwrap_or_else(|e| failed("audit_iteration_bound", e));
        let fast = run.elapsed < MAX_RUN_TIME;
        let converged =
            run.trace.terminated_by == Termination::GradBelowEps && run.trace.last().grad_norm <= run.eps;
        ok &= audit.passed && fast && converged;
        detail.push(format!(
            "dim {} eps {:e}: {} iterations <= ceil({:.1}) [{}], {:?}",
            run.dim,
            run.eps,
            run.trace.iterations(),
            run.bound,
            if audit.passed { "ok" } else { "FAIL" },
            run.elapsed
        ));
        let p = make_cosh_sum::<f64>(run.dim)?;
        let b = BoundInputs::new(1.0, 1.0, gap(&p, &Point::ones(run.dim)?), run.eps);
        let counters = run.trace.counters();
        col.bounds.push(
            BoundReport::evaluate(format!("memory-armijo cosh dim {} eps {:e}", run.dim, run.eps), &b)
                .with_measured(Measured {
                    iterations: run.trace.iterations(),
                    func_evals: counters.func_evals,
                    grad_evals: counters.grad_evals,
                }),
        );
        if run.trace.iterations() > 0 {
            // trial evaluations = all function evaluations minus one R0 per iteration
            let trials: usize = run.trace.records.iter().skip(1).map(|r| r.backtracks + 1).sum();
            col.info.push(format!(
                "cosh dim {} eps {:e}: {:.3} trial function evaluations per iteration (estimate 1 for f1 = f2 = 2)",
                run.dim,
                run.eps,
                trials as f64 / run.trace.iterations() as f64
            ));
        }
        col.audits.push(audit.with_notes(format!("cosh dim {} eps {:e}", run.dim, run.eps)));
    }
    Ok((ok, detail.join("; ")))
}

fn failed(name: &str, e: Error) -> AuditReport {
    AuditReport {
        name: name.to_string(),
        samples: 0,
        violations: 1,
        worst_margin: f64::NAN,
        passed: false,
        seed: None,
        notes: e.to_string(),
    }
}

fn c2_asymptotic(_: &mut Collect) -> Result<(bool, String)> {
    let b = BoundInputs::new(1.0, 1.0, 1.0, 1e-4);
    let ratio = memory_armijo_iteration_bound(&b)? / (8.0 * b.l0 * b.delta / (b.eps * b.eps));
    let check = asymptotic_equiv(&b)? / (8.0 * b.l0 * b.delta / (b.eps * b.eps));
    Ok((
        (0.99..=1.01).contains(&ratio) && check == 1.0,
        format!("bound / (8 L0 Δ/ε²) = {ratio:.6} at ε = 1e-4"),
    ))
}

struct ArmijoRun {
    label: String,
    eia: bool,
    lambda: f64,
    trace: RunTrace,
}

fn quadratic_floor_runs() -> Result<Vec<(Problem, RunTrace)>> {
    let mut out = Vec::new();
    for diag in [vec![1.0], vec![1.0, 0.5, 0.1], vec![4.0], vec![4.0, 1.0, 0.25]] {
        let p = make_quadratic(&diag)?;
        let trace = run_eia(&p, &Point::ones(diag.len())?, &armijo_cfg(1e-8, 10_000))?;
        out.push((p, trace));
    }
    Ok(out)
}

fn rosenbrock_eia_run() -> Result<RunTrace> {
    let p = make_rosenbrock(2)?;
    run_eia(&p, &Point::from_f64(&[-1.2, 1.0])?, &armijo_cfg(1e-10, 5000))
}

fn accounting_runs() -> Result<(RunTrace, RunTrace)> {
    let p = make_quadratic(&[1.0])?;
    let theta0 = Point::ones(1)?;
    let cfg = armijo_cfg(1e-8, 100);
    Ok((run_memory_armijo(&p, &theta0, &cfg)?, run_eia(&p, &theta0, &cfg)?))
}

fn c3_descent(col: &mut Collect) -> Result<(bool, String)> {
    let mut runs = Vec::new();
    for r in cosh_bound_runs()? {
        runs.push(ArmijoRun {
            label: format!("memory-armijo cosh dim {} eps {:e}", r.dim, r.eps),
            eia: false,
            lambda: 0.5,
            trace: r.trace,
        });
    }
    for (p, trace) in quadratic_floor_runs()? {
        runs.push(ArmijoRun {
            label: format!("eia quadratic dim {}", p.dim()),
            eia: true,
            lambda: 0.5,
            trace,
        });
    }
    runs.push(ArmijoRun {
        label: "eia rosenbrock".into(),
        eia: true,
        lambda: 0.5,
        trace: rosenbrock_eia_run()?,
    });
    let (ma, eia) = accounting_runs()?;
    runs.push(ArmijoRun { label: "memory-armijo quadratic".into(), eia: false, lambda: 0.5, trace: ma });
    runs.push(ArmijoRun { label: "eia quadratic".into(), eia: true, lambda: 0.5, trace: eia });

    let mut pairs = 0;
    let mut violations = 0;
    for run in &runs {
        let classical = audit_armijo_descent(&run.trace, run.lambda).with_notes(run.label.clone());
        pairs += classical.samples;
        violations += classical.violations;
        col.audits.push(classical);
        if run.eia {
            let implicit = audit_semi_implicit(&run.trace, run.lambda).with_notes(run.label.clone());
            violations += implicit.violations;
            col.audits.push(implicit);
        }
    }
    Ok((violations == 0, format!("{} runs, {pairs} consecutive pairs, {violations} violations", runs.len())))
}

fn c4_step_floor(col: &mut Collect) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for (p, trace) in quadratic_floor_runs()? {
        let l = p.known().lipschitz.expect("quadratic knows L");
        let b = BoundInputs { l: Some(l), ..BoundInputs::new(l, 0.0, 0.0, 1e-8) };
        let eta_star = eia_step_lower_bound(&b)?;
        let min_eta = trace.records.iter().skip(1).map(|r| r.eta).fold(f64::INFINITY, f64::min);
        let audit = audit_step_floor(&trace, eta_star);
        ok &= audit.passed && audit.samples > 0;
        detail.push(format!(
            "L = {l} dim {}: min η = {min_eta} ≥ η* = {eta_star} over {} steps",
            p.dim(),
            audit.samples
        ));
        col.audits.push(audit.with_notes(format!("quadratic L = {l}, dim {}", p.dim())));
    }
    Ok((ok, detail.join("; ")))
}

fn c5_lemmas(col: &mut Collect) -> Result<(bool, String)> {
    let p = make_cosh_sum(3)?;
    let pairs = sample_pairs(3, 1000, SAMPLE_BOX, PAIR_SEED);
    let growth = audit_gradient_growth(&p, &pairs, 1.0, 1.0)?.with_seed(PAIR_SEED);
    let descent = audit_descent_inequality(&p, &pairs, 1.0, 1.0)?.with_seed(PAIR_SEED);
    let ok = growth.passed && descent.passed && growth.samples == 10_000 && descent.samples == 1000;
    let detail = format!(
        "growth: {} violations / {} (worst margin {:e}); descent: {} / {} (worst margin {:e})",
        growth.violations,
        growth.samples,
        growth.worst_margin,
        descent.violations,
        descent.samples,
        descent.worst_margin
    );
    col.audits.push(growth);
    col.audits.push(descent);
    Ok((ok, detail))
}

fn c6_h_lemma(col: &mut Collect) -> Result<(bool, String)> {
    let audit = audit_h_lemma(1000, H_SEED);
    let ok = audit.passed && audit.samples == 10_000;
    let detail = format!("{} violations over {} grid points", audit.violations, audit.samples);
    col.audits.push(audit);
    Ok((ok, detail))
}

fn c7_clipping(col: &mut Collect) -> Result<(bool, String)> {
    let eps = 0.05;
    let p = make_cosh_sum(1)?;
    let theta0 = Point::from_f64(&[3.0])?;
    let b = BoundInputs::new(1.0, 1.0, gap(&p, &theta0), eps);
    let bound = clipping_bounds(&b)?.refined;
    let mut cfg = OptimizerConfig::clipped(ClipSchedule::refined(1.0, 1.0)?, eps, bound.ceil() as usize);
    cfg.clip_stop = ClipStop::RunningAverage;
    let trace = run_clipped_gd(&p, &theta0, &cfg)?;
    let reached = trace.running_average.iter().position(|&a| a <= 2.0 * eps).map(|i| i + 1);
    let counters = trace.counters();
    col.bounds.push(BoundReport::evaluate("clipped-gd cosh dim 1 theta0 = 3", &b).with_measured(Measured {
        iterations: trace.iterations(),
        func_evals: counters.func_evals,
        grad_evals: counters.grad_evals,
    }));
    let ok = trace.terminated_by == Termination::AverageGradBelowTarget
        && reached.is_some_and(|n| n as f64 <= bound);
    Ok((
        ok,
        match reached {
            Some(n) => format!("running mean ≤ 2ε after n = {n} ≤ {bound:.1}"),
            None => format!("running mean never reached 2ε within {bound:.1} iterations"),
        },
    ))
}

fn c8_o_small(col: &mut Collect) -> Result<(bool, String)> {
    let trace = rosenbrock_eia_run()?;
    let audit = audit_o_small_decay(&trace)?;
    let detail = format!("{} iterations ({:?}); {}", trace.iterations(), trace.terminated_by, audit.notes);
    let ok = audit.passed;
    col.audits.push(audit);
    Ok((ok, detail))
}

fn c9_finite_diff(col: &mut Collect) -> Result<(bool, String)> {
    let problems = [
        make_quadratic(&[1.0, 4.0, 0.5])?,
        make_cosh_sum(3)?,
        make_nesterov_worst(5)?,
        make_double_well()?,
        make_rosenbrock(2)?,
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, p) in problems.iter().enumerate() {
        let seed = FD_SEED + i as u64;
        let pts = sample_points(p.dim(), 100, SAMPLE_BOX, seed);
        let audit = audit_finite_diff(p, &pts).with_seed(seed).with_notes(p.name());
        ok &= audit.passed;
        detail.push(format!("{}: {} violations / {}", p.name(), audit.violations, audit.samples));
        col.audits.push(audit);
    }
    Ok((ok, detail.join("; ")))
}

fn c10_accounting(_: &mut Collect) -> Result<(bool, String)> {
    let p = make_quadratic(&[1.0])?;
    let theta0 = Point::ones(1)?;
    let cfg = armijo_cfg(1e-8, 100);
    let r0 = p.value(&theta0);
    let g = p.gradient(&theta0);

    let mut c = EvalCounters::new();
    let ma = memory_armijo_step(&p, &theta0, r0, &g, 1.0, &cfg.linesearch, &mut c)?;
    let step_ma = ma.backtracks == 0 && c == EvalCounters { func_evals: 1, grad_evals: 0 };
    let mut c = EvalCounters::new();
    let eia = eia_step(&p, &theta0, r0, &g, 1.0, &cfg.linesearch, &mut c)?;
    let step_eia = eia.backtracks == 0 && c == EvalCounters { func_evals: 1, grad_evals: 1 };

    // Run level: one gradient at θ0, one R0 per iteration, the trials, and
    // (Memory Armijo only) the gradient at the accepted point.
    let (ma_run, eia_run) = accounting_runs()?;
    let delta = |t: &RunTrace| t.records[1].counters.since(&t.records[0].counters);
    let run_ma = ma_run.iterations() == 1
        && ma_run.counters() == EvalCounters { func_evals: 2, grad_evals: 2 }
        && delta(&ma_run).func_evals == 1;
    let run_eia = eia_run.iterations() == 1
        && eia_run.counters() == EvalCounters { func_evals: 2, grad_evals: 2 }
        && delta(&eia_run) == EvalCounters { func_evals: 1, grad_evals: 1 };
    Ok((
        step_ma && step_eia && run_ma && run_eia,
        format!("memory-armijo totals {:?}, eia totals {:?}", ma_run.counters(), eia_run.counters()),
    ))
}

fn c11_bound_values(_: &mut Collect) -> Result<(bool, String)> {
    let unit = BoundInputs::new(1.0, 1.0, 1.0, 0.1);
    let e = std::f64::consts::E;
    // (name, computed, expected, relative tolerance)
    let checks = [
        ("memory_armijo_iteration_bound", memory_armijo_iteration_bound(&unit)?, 899.9, 1e-3),
        ("asymptotic_equiv", asymptotic_equiv(&unit)?, 800.0, 1e-9),
        ("admissible_step_tilde_eta", admissible_step_tilde_eta(1.0, &unit)?, 0.2231436, 1e-6),
        ("h_threshold", h_threshold(1.0, 2.0, 1.0)?, std::f64::consts::LN_2, 1e-9),
        ("eia_step_lower_bound", eia_step_lower_bound(&BoundInputs { l: Some(1.0), ..unit })?, 0.25, 1e-9),
        ("clipping_standard", clipping_bounds(&unit)?.standard, 2020.0, 1e-9),
        ("clipping_refined", clipping_bounds(&unit)?.refined, 3180.0, 1e-9),
        ("memory_armijo_grad_eval_bound", memory_armijo_grad_eval_bound(&unit)?, 1600.0, 1e-9),
        (
            "gd_lower",
            gd_bounds(&BoundInputs { m: Some(e), ..unit })?.lower.value().unwrap_or(f64::NAN),
            15.93,
            1e-3,
        ),
        ("gd_upper", gd_bounds(&BoundInputs { m: Some(2.0), ..unit })?.upper, 1200.0, 1e-9),
    ];
    let mut bad = Vec::new();
    for (name, got, want, tol) in checks {
        let rel = ((got - want) / want).abs();
        if !(rel <= tol) {
            bad.push(format!("{name}: {got} vs {want} (rel {rel:e})"));
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() { format!("{} values reproduced", checks.len()) } else { bad.join("; ") },
    ))
}
