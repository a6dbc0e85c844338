//! Outer optimization loops.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linesearch::{eia_step, memory_armijo_step, LineSearchConfig, LineSearchOutcome};
use crate::point::{grad_norm, Point};
use crate::problems::Problem;
use crate::scalar::Scalar;
use crate::trace::{EvalCounters, IterationRecord, RunTrace, Termination};

/// Constant in the refined clipping schedule.
pub const CLIP_REFINED_A: f64 = 1.06;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    MemoryArmijo,
    Eia,
    Gd,
    ClippedGd,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 4] =
        [OptimizerKind::MemoryArmijo, OptimizerKind::Eia, OptimizerKind::Gd, OptimizerKind::ClippedGd];

    pub fn as_str(&self) -> &'static str {
        match self {
            OptimizerKind::MemoryArmijo => "memory-armijo",
            OptimizerKind::Eia => "eia",
            OptimizerKind::Gd => "gd",
            OptimizerKind::ClippedGd => "clipped-gd",
        }
    }

    pub fn is_armijo_family(&self) -> bool {
        matches!(self, OptimizerKind::MemoryArmijo | OptimizerKind::Eia)
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown optimizer {s:?}")))
    }
}

/// Stopping rule for clipped GD.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClipStop {
    /// ‖∇R(θ_n)‖ ≤ eps.
    #[default]
    GradNorm,
    /// (1/n) Σ_{k=1..n} ‖∇R(θ_k)‖ ≤ 2·eps.
    RunningAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig<T: Scalar = f64> {
    /// Line-search parameters; `linesearch.eps` is the stopping tolerance of
    /// every optimizer.
    pub linesearch: LineSearchConfig<T>,
    pub gd_eta: Option<T>,
    pub clip_eta: Option<T>,
    pub clip_gamma: Option<T>,
    pub max_iter: usize,
    pub clip_stop: ClipStop,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            linesearch: LineSearchConfig::default(),
            gd_eta: None,
            clip_eta: None,
            clip_gamma: None,
            max_iter: 100_000,
            clip_stop: ClipStop::GradNorm,
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn armijo(linesearch: LineSearchConfig<T>, max_iter: usize) -> Self {
        Self { linesearch, max_iter, ..Self::default() }
    }

    pub fn gd(eta: T, eps: T, max_iter: usize) -> Self {
        Self {
            linesearch: LineSearchConfig { eps, ..LineSearchConfig::default() },
            gd_eta: Some(eta),
            max_iter,
            ..Self::default()
        }
    }

    pub fn clipped(schedule: ClipSchedule<T>, eps: T, max_iter: usize) -> Self {
        Self {
            linesearch: LineSearchConfig { eps, ..LineSearchConfig::default() },
            clip_eta: Some(schedule.eta),
            clip_gamma: Some(schedule.gamma),
            max_iter,
            ..Self::default()
        }
    }

    pub fn eps(&self) -> T {
        self.linesearch.eps
    }

    /// Checks the fields `kind` needs.
    pub fn validate_for(&self, kind: OptimizerKind) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        let positive = |name: &str, v: Option<T>| match v {
            Some(v) if v > T::zero() && v.is_finite() => Ok(v),
            Some(v) => Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}"))),
            None => Err(Error::InvalidConfig(format!("{name} is required for {kind}"))),
        };
        match kind {
            OptimizerKind::MemoryArmijo | OptimizerKind::Eia => self.linesearch.validate(),
            OptimizerKind::Gd => {
                positive("eps", Some(self.eps()))?;
                positive("gd_eta", self.gd_eta).map(drop)
            }
            OptimizerKind::ClippedGd => {
                positive("eps", Some(self.eps()))?;
                positive("clip_eta", self.clip_eta)?;
                positive("clip_gamma", self.clip_gamma).map(drop)
            }
        }
    }
}

/// Step size and clipping threshold for clipped GD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClipSchedule<T: Scalar = f64> {
    pub eta: T,
    pub gamma: T,
}

impl<T: Scalar> ClipSchedule<T> {
    /// `eta = 1/(10 L0)`, `gamma = min(1/eta, 1/(10 L1 eta))`.
    pub fn standard(l0: T, l1: T) -> Result<Self> {
        if !(l0 > T::zero()) {
            return Err(Error::Inapplicable(format!("standard clipping schedule needs L0 > 0, got {l0}")));
        }
        let ten = T::lit(10.0);
        let eta = T::one() / (ten * l0);
        let gamma =
            if l1 > T::zero() { (T::one() / eta).min(T::one() / (ten * l1 * eta)) } else { T::one() / eta };
        Ok(Self { eta, gamma })
    }

    /// `gamma = 1/(10 A L0)`, `eta = 1/(10 A L1)` with `A = 1.06`.
    pub fn refined(l0: T, l1: T) -> Result<Self> {
        if !(l0 > T::zero() && l1 > T::zero()) {
            return Err(Error::Inapplicable(format!(
                "refined clipping schedule needs L0, L1 > 0, got ({l0}, {l1})"
            )));
        }
        let ten_a = T::lit(10.0 * CLIP_REFINED_A);
        Ok(Self { eta: T::one() / (ten_a * l1), gamma: T::one() / (ten_a * l0) })
    }
}

/// Constant GD step `1/(2(M L1 + L0))`, with M the sup of ‖∇R‖ on the
/// initial sublevel set.
pub fn gd_step_for_sublevel<T: Scalar>(l0: T, l1: T, m: T) -> T {
    T::one() / (T::lit(2.0) * (m * l1 + l0))
}

pub fn run<T: Scalar>(
    kind: OptimizerKind,
    problem: &Problem<T>,
    theta0: &Point<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<RunTrace<T>> {
    match kind {
        OptimizerKind::MemoryArmijo => run_memory_armijo(problem, theta0, cfg),
        OptimizerKind::Eia => run_eia(problem, theta0, cfg),
        OptimizerKind::Gd => run_gd(problem, theta0, cfg),
        OptimizerKind::ClippedGd => run_clipped_gd(problem, theta0, cfg),
    }
}

pub fn run_memory_armijo<T: Scalar>(
    problem: &Problem<T>,
    theta0: &Point<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<RunTrace<T>> {
    cfg.validate_for(OptimizerKind::MemoryArmijo)?;
    run_armijo_family(problem, theta0, cfg, |theta, r0, g, eta, counters| {
        let out = memory_armijo_step(problem, theta, r0, g, eta, &cfg.linesearch, counters)?;
        let next_g = problem.gradient_counted(&out.next_point, counters);
        Ok((out, next_g))
    })
}

pub fn run_eia<T: Scalar>(
    problem: &Problem<T>,
    theta0: &Point<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<RunTrace<T>> {
    cfg.validate_for(OptimizerKind::Eia)?;
    run_armijo_family(problem, theta0, cfg, |theta, r0, g, eta, counters| {
        let mut out = eia_step(problem, theta, r0, g, eta, &cfg.linesearch, counters)?;
        let next_g = out.next_gradient.take().expect("eia_step returns the accepted gradient");
        Ok((out, next_g))
    })
}

fn run_armijo_family<T: Scalar>(
    problem: &Problem<T>,
    theta0: &Point<T>,
    cfg: &OptimizerConfig<T>,
    mut step: impl FnMut(&Point<T>, T, &[T], T, &mut EvalCounters) -> Result<(LineSearchOutcome<T>, Vec<T>)>,
) -> Result<RunTrace<T>> {
    problem.check_point(theta0)?;
    let eps = cfg.eps();
    let mut counters = EvalCounters::new();
    let mut theta = theta0.clone();
    let mut g = problem.gradient_counted(&theta, &mut counters);
    let mut g_norm = grad_norm(&g)?;
    let mut eta = cfg.linesearch.eta_init;
    let mut records: Vec<IterationRecord<T>> = Vec::new();

    let terminated_by = loop {
        if g_norm <= eps {
            if records.is_empty() {
                let r = finite_value(problem, &theta, &mut counters)?;
                records.push(initial_record(r, g_norm, eta, counters));
            }
            break Termination::GradBelowEps;
        }
        if !records.is_empty() && records.len() > cfg.max_iter {
            break Termination::MaxIter;
        }
        let r0 = finite_value(problem, &theta, &mut counters)?;
        if records.is_empty() {
            records.push(initial_record(r0, g_norm, eta, counters));
        }
        let (out, next_g) = match step(&theta, r0, &g, eta, &mut counters) {
            Ok(v) => v,
            Err(Error::StepUnderflow { .. }) => break Termination::StepUnderflow,
            Err(e) => return Err(e),
        };
        g_norm = grad_norm(&next_g)?;
        g = next_g;
        theta = out.next_point;
        eta = out.next_eta_memory;
        records.push(IterationRecord {
            iter: records.len(),
            r_value: out.next_value,
            grad_norm: g_norm,
            eta: out.accepted_eta,
            backtracks: out.backtracks,
            counters,
        });
    };

    Ok(RunTrace { records, terminated_by, final_point: theta, running_average: Vec::new() })
}

/// Constant-step gradient descent. Divergence is recorded, not an error,
/// as long as values stay finite.
pub fn run_gd<T: Scalar>(
    problem: &Problem<T>,
    theta0: &Point<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<RunTrace<T>> {
    cfg.validate_for(OptimizerKind::Gd)?;
    let eta = cfg.gd_eta.expect("validated");
    run_fixed_rule(problem, theta0, cfg, ClipStop::GradNorm, false, |_| eta)
}

/// Clipped GD: `θ ← θ − min(clip_eta, clip_gamma/‖g‖)·g`.
pub fn run_clipped_gd<T: Scalar>(
    problem: &Problem<T>,
    theta0: &Point<T>,
    cfg: &OptimizerConfig<T>,
) -> Result<RunTrace<T>> {
    cfg.validate_for(OptimizerKind::ClippedGd)?;
    let eta = cfg.clip_eta.expect("validated");
    let gamma = cfg.clip_gamma.expect("validated");
    run_fixed_rule(problem, theta0, cfg, cfg.clip_stop, true, |g_norm| {
        if g_norm > T::zero() {
            eta.min(gamma / g_norm)
        } else {
            eta
        }
    })
}

fn run_fixed_rule<T: Scalar>(
    problem: &Problem<T>,
    theta0: &Point<T>,
    cfg: &OptimizerConfig<T>,
    stop: ClipStop,
    track_average: bool,
    step_size: impl Fn(T) -> T,
) -> Result<RunTrace<T>> {
    problem.check_point(theta0)?;
    let eps = cfg.eps();
    let target = T::lit(2.0) * eps;
    let mut counters = EvalCounters::new();
    let mut theta = theta0.clone();
    let mut g = problem.gradient_counted(&theta, &mut counters);
    let mut g_norm = grad_norm(&g)?;
    let r = finite_value(problem, &theta, &mut counters)?;
    let mut records = vec![initial_record(r, g_norm, step_size(g_norm), counters)];
    let mut running_average = Vec::new();
    let mut sum = T::zero();

    let terminated_by = loop {
        match stop {
            ClipStop::GradNorm if g_norm <= eps => break Termination::GradBelowEps,
            ClipStop::RunningAverage if running_average.last().is_some_and(|&a: &T| a <= target) => {
                break Termination::AverageGradBelowTarget
            }
            _ => {}
        }
        if records.len() > cfg.max_iter {
            break Termination::MaxIter;
        }
        let eta = step_size(g_norm);
        theta = theta.step(eta, &g).ok_or_else(|| {
            Error::NonFiniteValue(format!("iterate overflowed at iteration {}", records.len()))
        })?;
        let r = finite_value(problem, &theta, &mut counters)?;
        g = problem.gradient_counted(&theta, &mut counters);
        g_norm = grad_norm(&g)?;
        records.push(IterationRecord {
            iter: records.len(),
            r_value: r,
            grad_norm: g_norm,
            eta,
            backtracks: 0,
            counters,
        });
        if track_average {
            sum = sum + g_norm;
            running_average.push(sum / T::from_usize(records.len() - 1).expect("iteration count"));
        }
    };

    Ok(RunTrace { records, terminated_by, final_point: theta, running_average })
}

fn finite_value<T: Scalar>(problem: &Problem<T>, x: &Point<T>, counters: &mut EvalCounters) -> Result<T> {
    let r = problem.value_counted(x, counters);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::NonFiniteValue(format!("objective {} is {r}", problem.name())))
    }
}

fn initial_record<T: Scalar>(r: T, g_norm: T, eta: T, counters: EvalCounters) -> IterationRecord<T> {
    IterationRecord { iter: 0, r_value: r, grad_norm: g_norm, eta, backtracks: 0, counters }
}
