//! Backtracking step-size selection with a memory effect.
//!
//! Both searches try `eta_in, eta_in/f1, eta_in/f1², …` and accept the first
//! trial that passes their test (`≤` accepts, `>` rejects). The accepted step
//! is inflated by `f2` and handed back as the first trial of the next outer
//! iteration.
//!
//! * [`memory_armijo_step`]: classical sufficient decrease
//!   `R(θ − ηg) − R(θ) ≤ −λη‖g‖²`.
//! * [`eia_step`]: the classical test **and** the semi-implicit test
//!   `R(θ − ηg) − R(θ) ≤ −λη‖g‖‖∇R(θ − ηg)‖`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{norm_unchecked, Point};
use crate::problems::Problem;
use crate::scalar::Scalar;
use crate::trace::EvalCounters;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearchConfig<T: Scalar = f64> {
    /// Sufficient-decrease constant, in (0, 1).
    pub lambda: T,
    /// Backtracking divisor, > 1.
    pub f1: T,
    /// Memory inflation factor, > 1.
    pub f2: T,
    pub eta_init: T,
    /// Stop once ‖∇R‖ ≤ eps.
    pub eps: T,
    pub max_backtracks: usize,
    pub eta_max: T,
}

impl<T: Scalar> Default for LineSearchConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::lit(0.5),
            f1: T::lit(2.0),
            f2: T::lit(2.0),
            eta_init: T::one(),
            eps: T::lit(1e-6),
            max_backtracks: 200,
            eta_max: T::lit(1e12),
        }
    }
}

impl<T: Scalar> LineSearchConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.lambda > T::zero() && self.lambda < T::one()) {
            return bad(format!("lambda must lie in (0, 1), got {}", self.lambda));
        }
        if !(self.f1 > T::one()) || !self.f1.is_finite() {
            return bad(format!("f1 must be > 1, got {}", self.f1));
        }
        if !(self.f2 > T::one()) || !self.f2.is_finite() {
            return bad(format!("f2 must be > 1, got {}", self.f2));
        }
        if !(self.eps > T::zero()) || !self.eps.is_finite() {
            return bad(format!("eps must be > 0, got {}", self.eps));
        }
        if !(self.eta_init > T::zero()) || !self.eta_init.is_finite() {
            return bad(format!("eta_init must be > 0, got {}", self.eta_init));
        }
        if !(self.eta_max >= self.eta_init) || !self.eta_max.is_finite() {
            return bad(format!(
                "eta_max ({}) must be finite and >= eta_init ({})",
                self.eta_max, self.eta_init
            ));
        }
        if self.max_backtracks == 0 {
            return bad("max_backtracks must be > 0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome<T: Scalar = f64> {
    pub accepted_eta: T,
    pub next_point: Point<T>,
    pub next_value: T,
    /// Rejected trials before acceptance.
    pub backtracks: usize,
    /// `min(f2 * accepted_eta, eta_max)`: first trial of the next search.
    pub next_eta_memory: T,
    /// ∇R at `next_point`, when the search already evaluated it.
    pub next_gradient: Option<Vec<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Classical,
    ExplicitImplicit,
}

/// Memory Armijo backtracking from `theta` along `-g`.
///
/// `r0` must be `R(theta)` and `g` must be `∇R(theta)` with `‖g‖ > 0`; neither
/// is recomputed. Each trial costs one function evaluation.
pub fn memory_armijo_step<T: Scalar>(
    problem: &Problem<T>,
    theta: &Point<T>,
    r0: T,
    g: &[T],
    eta_in: T,
    cfg: &LineSearchConfig<T>,
    counters: &mut EvalCounters,
) -> Result<LineSearchOutcome<T>> {
    search(problem, theta, r0, g, eta_in, cfg, counters, Rule::Classical)
}

/// Explicit-implicit Armijo backtracking: both the classical and the
/// semi-implicit condition must hold.
///
/// Each trial costs one function and one gradient evaluation; the accepted
/// trial's gradient is returned in [`LineSearchOutcome::next_gradient`].
pub fn eia_step<T: Scalar>(
    problem: &Problem<T>,
    theta: &Point<T>,
    r0: T,
    g: &[T],
    eta_in: T,
    cfg: &LineSearchConfig<T>,
    counters: &mut EvalCounters,
) -> Result<LineSearchOutcome<T>> {
    search(problem, theta, r0, g, eta_in, cfg, counters, Rule::ExplicitImplicit)
}

#[allow(clippy::too_many_arguments)]
fn search<T: Scalar>(
    problem: &Problem<T>,
    theta: &Point<T>,
    r0: T,
    g: &[T],
    eta_in: T,
    cfg: &LineSearchConfig<T>,
    counters: &mut EvalCounters,
    rule: Rule,
) -> Result<LineSearchOutcome<T>> {
    let g_norm = norm_unchecked(g);
    if !(g_norm > T::zero()) || !g_norm.is_finite() {
        return Err(Error::InvalidInput(format!(
            "line search needs a finite nonzero gradient, got norm {g_norm}"
        )));
    }
    if !(eta_in > T::zero()) || !eta_in.is_finite() {
        return Err(Error::InvalidInput(format!("initial trial step must be > 0, got {eta_in}")));
    }
    let v_dot = g_norm * g_norm;

    let mut eta = eta_in;
    let mut rejections = 0usize;
    loop {
        if let Some((point, value, next_gradient)) =
            trial(problem, theta, r0, g, g_norm, v_dot, eta, cfg.lambda, counters, rule)
        {
            return Ok(LineSearchOutcome {
                accepted_eta: eta,
                next_point: point,
                next_value: value,
                backtracks: rejections,
                next_eta_memory: (cfg.f2 * eta).min(cfg.eta_max),
                next_gradient,
            });
        }
        rejections += 1;
        if rejections > cfg.max_backtracks {
            return Err(Error::StepUnderflow { backtracks: rejections, last_eta: eta.to_f64_lossy() });
        }
        eta = eta / cfg.f1;
    }
}

/// One trial step; `Some` on acceptance.
#[allow(clippy::too_many_arguments)]
fn trial<T: Scalar>(
    problem: &Problem<T>,
    theta: &Point<T>,
    r0: T,
    g: &[T],
    g_norm: T,
    v_dot: T,
    eta: T,
    lambda: T,
    counters: &mut EvalCounters,
    rule: Rule,
) -> Option<(Point<T>, T, Option<Vec<T>>)> {
    let Some(point) = theta.step(eta, g) else {
        // The trial point itself overflowed: charged like an evaluation that
        // returned a non-finite value.
        counters.bump_func();
        if rule == Rule::ExplicitImplicit {
            counters.bump_grad();
        }
        return None;
    };
    let value = problem.value_counted(&point, counters);
    let decrease = value - r0;
    let classical = value.is_finite() && decrease <= -(lambda * eta * v_dot);
    match rule {
        Rule::Classical => classical.then_some((point, value, None)),
        Rule::ExplicitImplicit => {
            let next_g = problem.gradient_counted(&point, counters);
            let next_norm = norm_unchecked(&next_g);
            let implicit = next_norm.is_finite() && decrease <= -(lambda * eta * g_norm * next_norm);
            (classical && implicit).then_some((point, value, Some(next_g)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_cosh_sum, make_quadratic};

    fn cfg() -> LineSearchConfig {
        LineSearchConfig::default()
    }

    fn start(p: &Problem, x: &[f64]) -> (Point, f64, Vec<f64>) {
        let pt = Point::from_f64(x).unwrap();
        let r = p.value(&pt);
        let g = p.gradient(&pt);
        (pt, r, g)
    }

    #[test]
    fn armijo_accepts_on_equality() {
        let p = make_quadratic(&[1.0]).unwrap();
        let (x, r, g) = start(&p, &[1.0]);
        let mut c = EvalCounters::new();
        let out = memory_armijo_step(&p, &x, r, &g, 1.0, &cfg(), &mut c).unwrap();
        assert_eq!(out.accepted_eta, 1.0);
        assert_eq!(out.next_point.as_slice(), &[0.0]);
        assert_eq!(out.backtracks, 0);
        assert_eq!(out.next_eta_memory, 2.0);
        assert_eq!(c, EvalCounters { func_evals: 1, grad_evals: 0 });
        assert!(out.next_gradient.is_none());
    }

    #[test]
    fn armijo_backtracks_twice_from_four() {
        let p = make_quadratic(&[1.0]).unwrap();
        let (x, r, g) = start(&p, &[1.0]);
        let mut c = EvalCounters::new();
        let out = memory_armijo_step(&p, &x, r, &g, 4.0, &cfg(), &mut c).unwrap();
        assert_eq!(out.accepted_eta, 1.0);
        assert_eq!(out.backtracks, 2);
        assert_eq!(out.next_eta_memory, 2.0);
        assert_eq!(c.func_evals, 3);
    }

    #[test]
    fn eia_accepts_unit_step() {
        let p = make_quadratic(&[1.0]).unwrap();
        let (x, r, g) = start(&p, &[1.0]);
        let mut c = EvalCounters::new();
        let out = eia_step(&p, &x, r, &g, 1.0, &cfg(), &mut c).unwrap();
        assert_eq!(out.accepted_eta, 1.0);
        assert_eq!(out.backtracks, 0);
        assert_eq!(out.next_gradient.as_deref(), Some(&[0.0][..]));
        assert_eq!(c, EvalCounters { func_evals: 1, grad_evals: 1 });
    }

    #[test]
    fn eia_rejects_then_accepts() {
        // eta = 1.5: classical ΔR = -0.375 > -0.75 → reject.
        // eta = 0.75: ΔR = -0.46875 ≤ -0.28125 and ≤ -0.09375 → accept.
        let p = make_quadratic(&[1.0]).unwrap();
        let (x, r, g) = start(&p, &[1.0]);
        let mut c = EvalCounters::new();
        let out = eia_step(&p, &x, r, &g, 1.5, &cfg(), &mut c).unwrap();
        assert_eq!(out.accepted_eta, 0.75);
        assert_eq!(out.backtracks, 1);
        assert_eq!(out.next_value - r, -0.46875);
        assert_eq!(c, EvalCounters { func_evals: 2, grad_evals: 2 });
    }

    #[test]
    fn zero_gradient_is_rejected() {
        let p = make_quadratic(&[1.0]).unwrap();
        let (x, r, g) = start(&p, &[0.0]);
        let mut c = EvalCounters::new();
        assert!(matches!(
            memory_armijo_step(&p, &x, r, &g, 1.0, &cfg(), &mut c),
            Err(Error::InvalidInput(_))
        ));
        assert_eq!(c, EvalCounters::new());
    }

    #[test]
    fn non_finite_trials_are_rejections() {
        // cosh(1e6) overflows: the huge first trials must be rejected, not fail.
        let p = make_cosh_sum(1).unwrap();
        let (x, r, g) = start(&p, &[1.0]);
        let mut c = EvalCounters::new();
        let out = memory_armijo_step(&p, &x, r, &g, 1e6, &cfg(), &mut c).unwrap();
        assert!(out.backtracks > 10);
        assert!(out.next_value.is_finite());
        assert_eq!(c.func_evals as usize, out.backtracks + 1);
    }

    #[test]
    fn underflow_after_max_backtracks() {
        let p = make_quadratic(&[1.0]).unwrap();
        let (x, r, g) = start(&p, &[1.0]);
        let cfg = LineSearchConfig { max_backtracks: 3, ..cfg() };
        let mut c = EvalCounters::new();
        let err = memory_armijo_step(&p, &x, r, &g, 1e3, &cfg, &mut c).unwrap_err();
        assert_eq!(err, Error::StepUnderflow { backtracks: 4, last_eta: 125.0 });
        assert_eq!(c.func_evals, 4);
    }

    #[test]
    fn memory_is_capped() {
        let p = make_quadratic(&[1e-6]).unwrap();
        let (x, r, g) = start(&p, &[1.0]);
        let cfg = LineSearchConfig { eta_max: 1.5, eta_init: 1.0, ..cfg() };
        let mut c = EvalCounters::new();
        let out = memory_armijo_step(&p, &x, r, &g, 1.0, &cfg, &mut c).unwrap();
        assert_eq!(out.next_eta_memory, 1.5);
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        for bad in [
            LineSearchConfig { lambda: 1.0, ..cfg() },
            LineSearchConfig { lambda: 0.0, ..cfg() },
            LineSearchConfig { f1: 1.0, ..cfg() },
            LineSearchConfig { f2: 0.5, ..cfg() },
            LineSearchConfig { eps: 0.0, ..cfg() },
            LineSearchConfig { eta_init: 2e12, ..cfg() },
            LineSearchConfig { max_backtracks: 0, ..cfg() },
            LineSearchConfig { eps: f64::NAN, ..cfg() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))), "{bad:?}");
        }
    }

    #[test]
    fn works_in_single_precision() {
        let p = make_quadratic::<f32>(&[1.0]).unwrap();
        let x = Point::<f32>::from_f64(&[1.0]).unwrap();
        let mut c = EvalCounters::new();
        let out = memory_armijo_step(&p, &x, 0.5, &[1.0], 4.0, &LineSearchConfig::default(), &mut c).unwrap();
        assert_eq!(out.accepted_eta, 1.0_f32);
        assert_eq!(out.backtracks, 2);
    }
}
