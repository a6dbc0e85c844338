//! Numerical audits of the smoothness lemmas, the step-size results and the
//! decay claims, run against problems and traces.
//!
//! An audit counts violations of a `≤` inequality under an explicit slack and
//! records the worst margin `lhs − rhs` it saw (positive means violated).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{admissible_step_tilde_eta, h_eval, h_threshold, BoundInputs};
use crate::error::{Error, Result};
use crate::point::{dot, norm_unchecked, Point};
use crate::problems::Problem;
use crate::scalar::Scalar;
use crate::trace::{RunTrace, Termination};

/// Default sampling box for random points.
pub const SAMPLE_BOX: (f64, f64) = (-2.0, 2.0);

/// Audit slack for accept-test re-checks on traces.
pub const TRACE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` seen; negative when every sample held strictly.
    pub worst_margin: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl AuditReport {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }
}

/// Accumulates samples of one `lhs ≤ rhs + slack` inequality.
struct Tally {
    samples: usize,
    violations: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Self { samples: 0, violations: 0, worst: f64::NEG_INFINITY }
    }

    fn check(&mut self, lhs: f64, rhs: f64, slack: f64) {
        self.samples += 1;
        let margin = lhs - rhs;
        // NaN margins count as violations.
        if !(margin <= slack) {
            self.violations += 1;
        }
        if margin.is_nan() || margin > self.worst {
            self.worst = margin;
        }
    }

    fn finish(self, name: &str) -> AuditReport {
        AuditReport {
            name: name.to_string(),
            samples: self.samples,
            violations: self.violations,
            worst_margin: if self.samples == 0 { 0.0 } else { self.worst },
            passed: self.violations == 0,
            seed: None,
            notes: String::new(),
        }
    }
}

/// `count` seeded uniform points in `[lo, hi]^dim`.
pub fn sample_points<T: Scalar>(dim: usize, count: usize, (lo, hi): (f64, f64), seed: u64) -> Vec<Point<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coords = (0..dim).map(|_| T::lit(rng.gen_range(lo..=hi))).collect();
            Point::new(coords).expect("finite samples")
        })
        .collect()
}

pub fn sample_pairs<T: Scalar>(
    dim: usize,
    count: usize,
    bounds: (f64, f64),
    seed: u64,
) -> Vec<(Point<T>, Point<T>)> {
    let pts = sample_points(dim, 2 * count, bounds, seed);
    let mut it = pts.into_iter();
    (0..count).map(|_| (it.next().expect("two per pair"), it.next().expect("two per pair"))).collect()
}

fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// `(lhs, rhs)` of the gradient-growth inequality at `t ∈ [0, 1]`:
/// `‖∇R(γ(t)) − ∇R(y1)‖ ≤ (L0/L1 + ‖∇R(y1)‖)(exp(L1‖y2−y1‖t) − 1)`.
pub fn gradient_growth_sides<T: Scalar>(
    problem: &Problem<T>,
    y1: &Point<T>,
    y2: &Point<T>,
    t: T,
    l0: T,
    l1: T,
) -> (T, T) {
    let g1 = problem.gradient(y1);
    let gt = problem.gradient(&y1.lerp(y2, t));
    let lhs = norm_unchecked(&sub(&gt, &g1));
    let rhs = (l0 / l1 + norm_unchecked(&g1)) * (l1 * y1.distance(y2) * t).exp_m1();
    (lhs, rhs)
}

/// `(lhs, rhs)` of the descent inequality
/// `R(y2) − R(y1) ≤ ∇R(y1)·(y2−y1) − c‖y2−y1‖ − c/L1² + (c/L1²) exp(L1‖y2−y1‖)`
/// with `c = L0 + L1‖∇R(y1)‖`.
pub fn descent_inequality_sides<T: Scalar>(
    problem: &Problem<T>,
    y1: &Point<T>,
    y2: &Point<T>,
    l0: T,
    l1: T,
) -> (T, T) {
    let g1 = problem.gradient(y1);
    let d = y1.distance(y2);
    let c = l0 + l1 * norm_unchecked(&g1);
    let lhs = problem.value(y2) - problem.value(y1);
    let linear = dot(&g1, &sub(y2.as_slice(), y1.as_slice()));
    let rhs = linear - c * d + c / (l1 * l1) * (l1 * d).exp_m1();
    (lhs, rhs)
}

fn need_l1<T: Scalar>(l1: T) -> Result<()> {
    if l1 > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("audit needs L1 > 0, got {l1}")))
    }
}

/// Gradient-growth lemma at `t = 0.1, 0.2, …, 1.0` for every pair; slack
/// `1e-9 (1 + |rhs|)`.
pub fn audit_gradient_growth<T: Scalar>(
    problem: &Problem<T>,
    pairs: &[(Point<T>, Point<T>)],
    l0: T,
    l1: T,
) -> Result<AuditReport> {
    need_l1(l1)?;
    let mut tally = Tally::new();
    for (y1, y2) in pairs {
        for k in 1..=10 {
            let t = T::lit(k as f64 / 10.0);
            let (lhs, rhs) = gradient_growth_sides(problem, y1, y2, t, l0, l1);
            let rhs = rhs.to_f64_lossy();
            tally.check(lhs.to_f64_lossy(), rhs, 1e-9 * (1.0 + rhs.abs()));
        }
    }
    Ok(tally.finish("audit_gradient_growth"))
}

/// Descent inequality for every pair; slack `1e-9 (1 + |rhs|)`.
pub fn audit_descent_inequality<T: Scalar>(
    problem: &Problem<T>,
    pairs: &[(Point<T>, Point<T>)],
    l0: T,
    l1: T,
) -> Result<AuditReport> {
    need_l1(l1)?;
    let mut tally = Tally::new();
    for (y1, y2) in pairs {
        let (lhs, rhs) = descent_inequality_sides(problem, y1, y2, l0, l1);
        let rhs = rhs.to_f64_lossy();
        tally.check(lhs.to_f64_lossy(), rhs, 1e-9 * (1.0 + rhs.abs()));
    }
    Ok(tally.finish("audit_descent_inequality"))
}

/// Central differences with `h = 1e-6 (1 + |xᵢ|)` against the analytic
/// gradient: `|fd − g| ≤ max(1e-5 |g|, 1e-8)` per coordinate.
pub fn audit_finite_diff<T: Scalar>(problem: &Problem<T>, points: &[Point<T>]) -> AuditReport {
    let mut tally = Tally::new();
    for x in points {
        let g = problem.gradient(x);
        let mut coords = x.as_slice().to_vec();
        for i in 0..coords.len() {
            let xi = coords[i];
            let h = T::lit(1e-6) * (T::one() + xi.abs());
            coords[i] = xi + h;
            let plus = problem.value(&Point::new(coords.clone()).expect("finite"));
            coords[i] = xi - h;
            let minus = problem.value(&Point::new(coords.clone()).expect("finite"));
            coords[i] = xi;
            let fd = ((plus - minus) / (h + h)).to_f64_lossy();
            let an = g[i].to_f64_lossy();
            let tol = (1e-5 * an.abs()).max(1e-8);
            tally.check((fd - an).abs(), tol, 0.0);
        }
    }
    tally.finish("audit_finite_diff")
}

/// Finite-sample proxy for `min_{k<n} ‖∇R(θ_k)‖ = o(1/n)`: with
/// `g_n = min_{k<n} grad_norm`, passes iff `max_{n ∈ [150, end]} n·g_n <
/// max_{n ∈ [25, 75]} n·g_n`. Needs at least 200 iterations.
pub fn audit_o_small_decay<T: Scalar>(trace: &RunTrace<T>) -> Result<AuditReport> {
    if trace.iterations() < 200 {
        return Err(Error::Inapplicable(format!(
            "o(1/n) check needs >= 200 iterations, trace has {}",
            trace.iterations()
        )));
    }
    let end = trace.records.len();
    let mut running = f64::INFINITY;
    let mut scaled = Vec::with_capacity(end + 1);
    scaled.push(f64::NAN);
    for (k, r) in trace.records.iter().enumerate() {
        running = running.min(r.grad_norm.to_f64_lossy());
        scaled.push((k + 1) as f64 * running);
    }
    let window_max = |lo: usize, hi: usize| scaled[lo..=hi].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let head = window_max(25, 75);
    let tail = window_max(150, end);
    let mut tally = Tally::new();
    tally.samples = end;
    tally.worst = tail - head;
    if !(tail < head) {
        tally.violations = 1;
    }
    Ok(tally
        .finish("audit_o_small_decay")
        .with_notes(format!("head max n*g_n = {head:e}, tail max = {tail:e}")))
}

/// Accepted steps (records 1..) must be ≥ `eta_star − 1e-12`.
pub fn audit_step_floor<T: Scalar>(trace: &RunTrace<T>, eta_star: T) -> AuditReport {
    let floor = eta_star.to_f64_lossy();
    let mut tally = Tally::new();
    for r in trace.records.iter().skip(1) {
        tally.check(floor, r.eta.to_f64_lossy(), TRACE_SLACK);
    }
    tally.finish("audit_step_floor")
}

/// Every accepted step is at least `η̃(‖g_n‖)/f1`.
pub fn audit_admissible_step<T: Scalar>(trace: &RunTrace<T>, b: &BoundInputs<T>) -> Result<AuditReport> {
    let mut tally = Tally::new();
    for w in trace.records.windows(2) {
        let floor = admissible_step_tilde_eta(w[0].grad_norm, b)? / b.f1;
        tally.check(floor.to_f64_lossy(), w[1].eta.to_f64_lossy(), TRACE_SLACK);
    }
    Ok(tally.finish("audit_admissible_step"))
}

/// Iterations to termination must not exceed `⌈bound⌉`.
pub fn audit_iteration_bound<T: Scalar>(trace: &RunTrace<T>, bound: T) -> Result<AuditReport> {
    if trace.terminated_by != Termination::GradBelowEps {
        return Err(Error::Inapplicable(format!(
            "iteration-bound check needs a converged run, got {:?}",
            trace.terminated_by
        )));
    }
    let mut tally = Tally::new();
    let ceil = bound.ceil().to_f64_lossy();
    tally.check(trace.iterations() as f64, ceil, 0.0);
    Ok(tally
        .finish("audit_iteration_bound")
        .with_notes(format!("iterations = {}, bound = {ceil}", trace.iterations())))
}

/// Re-checks the classical accept test between consecutive records:
/// `R_{n+1} − R_n ≤ −λ η_{n+1} ‖g_n‖² + 1e-12`.
pub fn audit_armijo_descent<T: Scalar>(trace: &RunTrace<T>, lambda: T) -> AuditReport {
    let mut tally = Tally::new();
    for w in trace.records.windows(2) {
        let lhs = (w[1].r_value - w[0].r_value).to_f64_lossy();
        let rhs = -(lambda * w[1].eta * w[0].grad_norm * w[0].grad_norm).to_f64_lossy();
        tally.check(lhs, rhs, TRACE_SLACK);
    }
    tally.finish("audit_armijo_descent")
}

/// Re-checks the semi-implicit accept test between consecutive records:
/// `R_{n+1} − R_n ≤ −λ η_{n+1} ‖g_n‖ ‖g_{n+1}‖ + 1e-12`.
pub fn audit_semi_implicit<T: Scalar>(trace: &RunTrace<T>, lambda: T) -> AuditReport {
    let mut tally = Tally::new();
    for w in trace.records.windows(2) {
        let lhs = (w[1].r_value - w[0].r_value).to_f64_lossy();
        let rhs = -(lambda * w[1].eta * w[0].grad_norm * w[1].grad_norm).to_f64_lossy();
        tally.check(lhs, rhs, TRACE_SLACK);
    }
    tally.finish("audit_semi_implicit")
}

/// `h(x) < 0` on a 10-point grid spanning `(0, threshold]` for `triples`
/// seeded random `(a, b, c) ∈ (0, 3]³` with `b > ac`.
pub fn audit_h_lemma(triples: usize, seed: u64) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new();
    let mut kept = 0;
    while kept < triples {
        // (0, 3]: map [0, 1) → (0, 3]
        let mut draw = || 3.0 * (1.0 - rng.gen::<f64>());
        let (a, b, c) = (draw(), draw(), draw());
        let Ok(threshold) = h_threshold(a, b, c) else { continue };
        kept += 1;
        for j in 1..=10 {
            let x = threshold * j as f64 / 10.0;
            // strict: h(x) < 0
            let h = h_eval(a, b, c, x);
            tally.samples += 1;
            let margin = h;
            if !(margin < 0.0) {
                tally.violations += 1;
            }
            if margin.is_nan() || margin > tally.worst {
                tally.worst = margin;
            }
        }
    }
    tally.finish("audit_h_lemma").with_seed(seed)
}
