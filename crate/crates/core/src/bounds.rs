//! Closed-form complexity and step-size bounds.
//!
//! Logarithms are natural throughout, including the `log M` of the
//! constant-step GD lower bound. Every formula checks its own hypotheses and
//! returns [`Error::Inapplicable`] instead of a NaN or an infinity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::CLIP_REFINED_A;
use crate::scalar::Scalar;

/// Fixed `d < 1` used by [`eia_complexity_bound_symbolic`].
pub const EIA_COROLLARY_D: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs<T: Scalar = f64> {
    pub l0: T,
    pub l1: T,
    /// Lipschitz constant of ∇R on the visited region.
    pub l: Option<T>,
    /// sup ‖∇R‖ on the initial sublevel set.
    pub m: Option<T>,
    /// R(θ0) − R*.
    pub delta: T,
    pub eps: T,
    pub lambda: T,
    pub f1: T,
    pub f2: T,
}

impl<T: Scalar> BoundInputs<T> {
    /// Inputs with the usual hyperparameters λ = ½, f1 = f2 = 2.
    pub fn new(l0: T, l1: T, delta: T, eps: T) -> Self {
        Self { l0, l1, l: None, m: None, delta, eps, lambda: T::lit(0.5), f1: T::lit(2.0), f2: T::lit(2.0) }
    }

    fn check_common(&self) -> Result<()> {
        if !(self.eps > T::zero()) || !self.eps.is_finite() {
            return Err(Error::InvalidInput(format!("eps must be > 0, got {}", self.eps)));
        }
        if !(self.delta >= T::zero()) || !self.delta.is_finite() {
            return Err(Error::InvalidInput(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(self.l0 >= T::zero() && self.l1 >= T::zero()) {
            return Err(Error::InvalidInput(format!("L0, L1 must be >= 0, got ({}, {})", self.l0, self.l1)));
        }
        Ok(())
    }

    fn check_lambda(&self) -> Result<()> {
        if !(self.lambda > T::zero() && self.lambda < T::one()) {
            return Err(Error::InvalidInput(format!("lambda must lie in (0, 1), got {}", self.lambda)));
        }
        Ok(())
    }

    fn check_f1(&self) -> Result<()> {
        if !(self.f1 > T::one()) {
            return Err(Error::InvalidInput(format!("f1 must be > 1, got {}", self.f1)));
        }
        Ok(())
    }
}

fn finite_nonneg<T: Scalar>(name: &str, v: T) -> Result<T> {
    if v.is_finite() && v >= T::zero() {
        Ok(v)
    } else {
        Err(Error::Inapplicable(format!("{name} evaluates to {v}")))
    }
}

/// ln((L0 + L1(2−λ)x) / (L0 + L1 x)), computed through `ln_1p`.
fn log_ratio<T: Scalar>(l0: T, l1: T, lambda: T, x: T) -> T {
    (l1 * (T::one() - lambda) * x / (l0 + l1 * x)).ln_1p()
}

/// Iterations after which Memory Armijo has visited a point with
/// ‖∇R‖ ≤ eps on an (L0, L1)-smooth function:
/// `f1 L1 Δ / (λ ε ln((L0 + L1(2−λ)ε)/(L0 + L1ε)))`.
///
/// For `L1 = 0` use [`classical_iteration_bound`].
pub fn memory_armijo_iteration_bound<T: Scalar>(b: &BoundInputs<T>) -> Result<T> {
    b.check_common()?;
    b.check_f1()?;
    if !(b.lambda > T::zero() && b.lambda <= T::one()) {
        return Err(Error::InvalidInput(format!("lambda must lie in (0, 1), got {}", b.lambda)));
    }
    if !(b.l1 > T::zero()) {
        return Err(Error::Inapplicable(
            "L1 = 0 is classical smoothness; use the classical bound f1 L Δ/(λ(1−λ)ε²)".into(),
        ));
    }
    let log = log_ratio(b.l0, b.l1, b.lambda, b.eps);
    if !(log > T::zero()) {
        return Err(Error::Inapplicable(format!(
            "logarithm in the denominator is {log} (lambda -> 1 makes the bound infinite)"
        )));
    }
    finite_nonneg("memory Armijo iteration bound", b.f1 * b.l1 * b.delta / (b.lambda * b.eps * log))
}

/// Classical-smoothness counterpart `f1 L Δ / (λ (1−λ) ε²)`; `L` defaults to
/// `L0` when not given.
pub fn classical_iteration_bound<T: Scalar>(b: &BoundInputs<T>) -> Result<T> {
    b.check_common()?;
    b.check_lambda()?;
    b.check_f1()?;
    let l = b.l.unwrap_or(b.l0);
    if !(l > T::zero()) {
        return Err(Error::Inapplicable("classical bound needs L > 0".into()));
    }
    finite_nonneg(
        "classical iteration bound",
        b.f1 * l * b.delta / (b.lambda * (T::one() - b.lambda) * b.eps * b.eps),
    )
}

/// Small-ε equivalent `f1 L0 Δ / (λ(1−λ) ε²)`; equals `8 L0 Δ/ε²` for
/// f1 = 2, λ = ½.
pub fn asymptotic_equiv<T: Scalar>(b: &BoundInputs<T>) -> Result<T> {
    b.check_common()?;
    b.check_lambda()?;
    b.check_f1()?;
    if !(b.l0 > T::zero()) {
        return Err(Error::Inapplicable("asymptotic equivalent needs L0 > 0".into()));
    }
    finite_nonneg(
        "asymptotic equivalent",
        b.f1 * b.l0 * b.delta / (b.lambda * (T::one() - b.lambda) * b.eps * b.eps),
    )
}

/// Step that passes the classical Armijo test at any point with gradient
/// norm `g_norm` of any (L0, L1)-smooth function:
/// `(1/(L1 g)) ln((L0 + L1(2−λ)g)/(L0 + L1 g))`.
pub fn admissible_step_tilde_eta<T: Scalar>(g_norm: T, b: &BoundInputs<T>) -> Result<T> {
    if !(g_norm > T::zero()) || !g_norm.is_finite() {
        return Err(Error::InvalidInput(format!("gradient norm must be > 0, got {g_norm}")));
    }
    b.check_lambda()?;
    if !(b.l1 > T::zero()) {
        return Err(Error::Inapplicable("admissible step needs L1 > 0".into()));
    }
    if !(b.l0 >= T::zero()) {
        return Err(Error::InvalidInput(format!("L0 must be >= 0, got {}", b.l0)));
    }
    finite_nonneg("admissible step", log_ratio(b.l0, b.l1, b.lambda, g_norm) / (b.l1 * g_norm))
}

/// `h(x) = −a − b x + a e^{c x}`, evaluated as `a·expm1(cx) − bx`.
pub fn h_eval<T: Scalar>(a: T, b: T, c: T, x: T) -> T {
    a * (c * x).exp_m1() - b * x
}

/// `(1/c) ln(b/(ac))`: `h < 0` on `(0, threshold]` when `a, b, c > 0` and
/// `b > ac`.
pub fn h_threshold<T: Scalar>(a: T, b: T, c: T) -> Result<T> {
    if !(a > T::zero() && b > T::zero() && c > T::zero()) {
        return Err(Error::InvalidInput(format!("a, b, c must be > 0, got ({a}, {b}, {c})")));
    }
    if !(b > a * c) {
        return Err(Error::Inapplicable(format!("needs b > ac, got b = {b}, ac = {}", a * c)));
    }
    Ok((b / (a * c)).ln() / c)
}

/// Uniform floor on accepted EIA steps, `2(1−λ)/(f1 (1+2λ) L)`.
pub fn eia_step_lower_bound<T: Scalar>(b: &BoundInputs<T>) -> Result<T> {
    b.check_lambda()?;
    b.check_f1()?;
    let l = b.l.ok_or_else(|| Error::Inapplicable("EIA step floor needs L".into()))?;
    if !(l > T::zero()) {
        return Err(Error::Inapplicable(format!("EIA step floor needs L > 0, got {l}")));
    }
    let two = T::lit(2.0);
    Ok(two * (T::one() - b.lambda) / (b.f1 * (T::one() + two * b.lambda) * l))
}

fn check_factors<T: Scalar>(f1: T, f2: T) -> Result<T> {
    if !(f1 > T::one() && f2 > T::one()) {
        return Err(Error::InvalidInput(format!("f1, f2 must be > 1, got ({f1}, {f2})")));
    }
    Ok(T::one() + f2.ln() / f1.ln())
}

/// Function evaluations per Memory Armijo iteration, `½[1 + ln f2/ln f1]`.
pub fn evals_per_iter_memory<T: Scalar>(f1: T, f2: T) -> Result<T> {
    Ok(T::lit(0.5) * check_factors(f1, f2)?)
}

/// Gradient-equivalent evaluations per EIA iteration,
/// `(3/2)[1 + ln f2/ln f1] + 1`.
pub fn eia_eval_factor<T: Scalar>(f1: T, f2: T) -> Result<T> {
    Ok(T::lit(1.5) * check_factors(f1, f2)? + T::one())
}

/// Value of a bound, or why it does not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundValue<T: Scalar = f64> {
    Value(T),
    Inapplicable(String),
}

impl<T: Scalar> BoundValue<T> {
    pub fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => BoundValue::Value(v),
            Err(e) => BoundValue::Inapplicable(e.to_string()),
        }
    }

    pub fn value(&self) -> Option<T> {
        match self {
            BoundValue::Value(v) => Some(*v),
            BoundValue::Inapplicable(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdBounds<T: Scalar = f64> {
    /// `L1 M (Δ − 5ε/8) / (8 ε² (ln M + 1))`, for L0 ≥ 1, L1 ≥ 1, M > 1.
    pub lower: BoundValue<T>,
    /// `4 (M L1 + L0) Δ / ε²` with step `1/(2(M L1 + L0))`.
    pub upper: T,
}

/// Lower and upper iteration complexity of constant-step GD.
pub fn gd_bounds<T: Scalar>(b: &BoundInputs<T>) -> Result<GdBounds<T>> {
    b.check_common()?;
    let m = b.m.ok_or_else(|| Error::Inapplicable("GD bounds need M".into()))?;
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::Inapplicable(format!("GD bounds need finite M > 0, got {m}")));
    }
    let eps2 = b.eps * b.eps;
    let upper = finite_nonneg("GD upper bound", T::lit(4.0) * (m * b.l1 + b.l0) * b.delta / eps2)?;
    let lower = if !(b.l0 >= T::one() && b.l1 >= T::one() && m > T::one()) {
        BoundValue::Inapplicable(format!(
            "lower bound requires L0 >= 1, L1 >= 1, M > 1 (got {}, {}, {m})",
            b.l0, b.l1
        ))
    } else {
        let numer = b.l1 * m * (b.delta - T::lit(5.0 / 8.0) * b.eps);
        if numer < T::zero() {
            BoundValue::Inapplicable("delta < 5 eps / 8".into())
        } else {
            BoundValue::Value(numer / (T::lit(8.0) * eps2 * (m.ln() + T::one())))
        }
    };
    Ok(GdBounds { lower, upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClippingBounds<T: Scalar = f64> {
    /// `20 L0 Δ/ε² + 20 max(1, L1²) Δ / L0`.
    pub standard: T,
    /// `30 Δ max(A L0/ε², 25 A L1²/L0)` with A = 1.06; bounds the iterations
    /// until the running mean of ‖∇R‖ is ≤ 2ε.
    pub refined: T,
}

pub fn clipping_bounds<T: Scalar>(b: &BoundInputs<T>) -> Result<ClippingBounds<T>> {
    b.check_common()?;
    if !(b.l0 > T::zero()) {
        return Err(Error::Inapplicable("clipping bounds need L0 > 0".into()));
    }
    let eps2 = b.eps * b.eps;
    let l1_sq = b.l1 * b.l1;
    let twenty = T::lit(20.0);
    let a = T::lit(CLIP_REFINED_A);
    let standard = twenty * b.l0 * b.delta / eps2 + twenty * T::one().max(l1_sq) * b.delta / b.l0;
    let refined = T::lit(30.0) * b.delta * (a * b.l0 / eps2).max(T::lit(25.0) * a * l1_sq / b.l0);
    Ok(ClippingBounds {
        standard: finite_nonneg("standard clipping bound", standard)?,
        refined: finite_nonneg("refined clipping bound", refined)?,
    })
}

/// Leading coefficient `4[1 + log₂ f2] + 8` of the Memory Armijo
/// evaluation estimate, in units of `L0 Δ/ε²`.
pub fn grad_eval_coefficient<T: Scalar>(f2: T) -> Result<T> {
    if !(f2 > T::one()) {
        return Err(Error::InvalidInput(format!("f2 must be > 1, got {f2}")));
    }
    Ok(T::lit(4.0) * (T::one() + f2.ln() / T::lit(2.0).ln()) + T::lit(8.0))
}

/// Total gradient-equivalent evaluations of Memory Armijo for f1 = 2,
/// λ = ½ and small ε: `4[1 + ln f2/ln 2] L0Δ/ε² + 8 L0Δ/ε²`.
pub fn memory_armijo_grad_eval_bound<T: Scalar>(b: &BoundInputs<T>) -> Result<T> {
    b.check_common()?;
    if b.f1 != T::lit(2.0) || b.lambda != T::lit(0.5) {
        return Err(Error::Inapplicable(format!(
            "evaluation estimate is specialised to f1 = 2, lambda = 1/2 (got {}, {})",
            b.f1, b.lambda
        )));
    }
    if !(b.l0 > T::zero()) {
        return Err(Error::Inapplicable("evaluation estimate needs L0 > 0".into()));
    }
    let coeff = grad_eval_coefficient(b.f2)?;
    finite_nonneg("evaluation estimate", coeff * b.l0 * b.delta / (b.eps * b.eps))
}

/// EIA iteration bound
/// `(1/ε)[(s̃+1)/(dλη*)·φ(Δ/(s̃+1)) + (s̃+1)√(Δ/λ)(η*)^{−3/2}]` with `d = 0.99`.
///
/// Diagnostic only: `s_tilde` and `phi_at = φ(Δ/(s̃+1))` are supplied by the
/// caller, not derived from the objective.
pub fn eia_complexity_bound_symbolic<T: Scalar>(
    eta_star: T,
    delta: T,
    eps: T,
    lambda: T,
    s_tilde: u32,
    phi_at: T,
) -> Result<T> {
    if !(eta_star > T::zero() && eps > T::zero() && lambda > T::zero() && lambda < T::one()) {
        return Err(Error::InvalidInput(format!(
            "need eta* > 0, eps > 0, lambda in (0, 1); got ({eta_star}, {eps}, {lambda})"
        )));
    }
    if !(delta >= T::zero() && phi_at >= T::zero()) {
        return Err(Error::InvalidInput(format!("need delta >= 0 and phi >= 0; got ({delta}, {phi_at})")));
    }
    let pieces = T::from_u32(s_tilde).expect("u32 fits") + T::one();
    let d = T::lit(EIA_COROLLARY_D);
    let first = pieces / (d * lambda * eta_star) * phi_at;
    let second = pieces * (delta / lambda).sqrt() * eta_star.powf(T::lit(-1.5));
    finite_nonneg("EIA symbolic bound", (first + second) / eps)
}

/// Measured counts placed next to the formulas in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measured {
    pub iterations: usize,
    pub func_evals: u64,
    pub grad_evals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry<T: Scalar = f64> {
    pub name: String,
    pub value: BoundValue<T>,
    pub inputs: BTreeMap<String, T>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport<T: Scalar = f64> {
    pub label: String,
    pub entries: Vec<BoundEntry<T>>,
    pub measured: Option<Measured>,
}

impl<T: Scalar> BoundReport<T> {
    /// Evaluates every formula applicable to `b`.
    pub fn evaluate(label: impl Into<String>, b: &BoundInputs<T>) -> Self {
        let mut inputs = BTreeMap::new();
        for (k, v) in [
            ("L0", Some(b.l0)),
            ("L1", Some(b.l1)),
            ("L", b.l),
            ("M", b.m),
            ("delta", Some(b.delta)),
            ("eps", Some(b.eps)),
            ("lambda", Some(b.lambda)),
            ("f1", Some(b.f1)),
            ("f2", Some(b.f2)),
        ] {
            if let Some(v) = v {
                inputs.insert(k.to_string(), v);
            }
        }
        let entry = |name: &str, value: Result<T>, notes: &str| BoundEntry {
            name: name.to_string(),
            value: BoundValue::from_result(value),
            inputs: inputs.clone(),
            notes: notes.to_string(),
        };
        let gd = gd_bounds(b);
        let clip = clipping_bounds(b);
        let entries = vec![
            entry("memory_armijo_iteration_bound", memory_armijo_iteration_bound(b), ""),
            entry("classical_iteration_bound", classical_iteration_bound(b), ""),
            entry("asymptotic_equiv", asymptotic_equiv(b), ""),
            entry("memory_armijo_grad_eval_bound", memory_armijo_grad_eval_bound(b), ""),
            entry("evals_per_iter_memory", evals_per_iter_memory(b.f1, b.f2), ""),
            entry("eia_eval_factor", eia_eval_factor(b.f1, b.f2), ""),
            entry("eia_step_lower_bound", eia_step_lower_bound(b), ""),
            entry(
                "gd_lower_bound",
                gd.clone().and_then(|g| match g.lower {
                    BoundValue::Value(v) => Ok(v),
                    BoundValue::Inapplicable(why) => Err(Error::Inapplicable(why)),
                }),
                "natural logarithm for log M",
            ),
            entry("gd_upper_bound", gd.map(|g| g.upper), ""),
            entry("clipping_standard_bound", clip.clone().map(|c| c.standard), ""),
            entry("clipping_refined_bound", clip.map(|c| c.refined), "A = 1.06"),
        ];
        Self { label: label.into(), entries, measured: None }
    }

    pub fn with_measured(mut self, measured: Measured) -> Self {
        self.measured = Some(measured);
        self
    }

    pub fn get(&self, name: &str) -> Option<&BoundEntry<T>> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(eps: f64) -> BoundInputs {
        BoundInputs::new(1.0, 1.0, 1.0, eps)
    }

    #[test]
    fn iteration_bound_example() {
        // 2 / (0.05 · ln(1.15/1.1))
        let expected = 2.0 / (0.05 * (1.15_f64 / 1.1).ln());
        let v = memory_armijo_iteration_bound(&unit(0.1)).unwrap();
        assert_relative_eq!(v, expected, max_relative = 1e-12);
        assert_relative_eq!(v, 899.9, max_relative = 1e-3);
    }

    #[test]
    fn iteration_bound_needs_l1() {
        let b = BoundInputs::new(1.0, 0.0, 1.0, 0.1);
        assert!(matches!(memory_armijo_iteration_bound(&b), Err(Error::Inapplicable(_))));
        // classical fallback: 2·1·1/(0.25·0.01) = 800
        assert_relative_eq!(classical_iteration_bound(&b).unwrap(), 800.0, max_relative = 1e-12);
    }

    #[test]
    fn iteration_bound_degenerate_lambda() {
        let b = BoundInputs { lambda: 1.0, ..unit(0.1) };
        assert!(matches!(memory_armijo_iteration_bound(&b), Err(Error::Inapplicable(_))));
        let near = memory_armijo_iteration_bound(&BoundInputs { lambda: 0.999, ..unit(0.1) }).unwrap();
        let mid = memory_armijo_iteration_bound(&unit(0.1)).unwrap();
        assert!(near > 100.0 * mid);
    }

    #[test]
    fn asymptotic_equiv_examples() {
        assert_relative_eq!(asymptotic_equiv(&unit(0.1)).unwrap(), 800.0, max_relative = 1e-12);
        // coefficient f1/(λ(1−λ)) = 8 for f1 = 2, λ = ½
        assert_eq!(asymptotic_equiv(&unit(1.0)).unwrap(), 8.0);
        assert_eq!(asymptotic_equiv(&BoundInputs { delta: 0.0, ..unit(0.1) }).unwrap(), 0.0);
        let b = BoundInputs::new(0.0, 1.0, 1.0, 0.1);
        assert!(matches!(asymptotic_equiv(&b), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn ratio_tends_to_one() {
        for (eps, tol) in [(1e-4, 1e-2), (1e-5, 1e-3)] {
            let ratio =
                asymptotic_equiv(&unit(eps)).unwrap() / memory_armijo_iteration_bound(&unit(eps)).unwrap();
            assert!((ratio - 1.0).abs() <= tol, "eps {eps}: ratio {ratio}");
        }
    }

    #[test]
    fn admissible_step_examples() {
        let v = admissible_step_tilde_eta(1.0, &unit(0.1)).unwrap();
        assert_relative_eq!(v, 1.25_f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(v, 0.2231436, max_relative = 1e-6);
        // ln(1 + x) ≈ x: limit (1 − λ)/L0
        let small = admissible_step_tilde_eta(1e-8, &unit(0.1)).unwrap();
        assert_relative_eq!(small, 0.5, max_relative = 1e-7);
        assert!(matches!(admissible_step_tilde_eta(0.0, &unit(0.1)), Err(Error::InvalidInput(_))));
        assert!(matches!(admissible_step_tilde_eta(-1.0, &unit(0.1)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn h_examples() {
        assert_relative_eq!(h_threshold(1.0, 2.0, 1.0).unwrap(), 2.0_f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(h_eval(1.0, 2.0, 1.0, 0.5), -2.0 + 0.5_f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(h_eval(1.0, 2.0, 1.0, 0.5), -0.35128, max_relative = 1e-4);
        assert_eq!(h_eval(1.3, 2.0, 0.7, 0.0), 0.0);
        assert!(matches!(h_threshold(1.0, 1.0, 1.0), Err(Error::Inapplicable(_))));
        assert!(matches!(h_threshold(0.0, 1.0, 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn eia_floor_examples() {
        let b = BoundInputs { l: Some(1.0), ..unit(0.1) };
        assert_relative_eq!(eia_step_lower_bound(&b).unwrap(), 0.25, max_relative = 1e-12);
        let b = BoundInputs { l: Some(4.0), ..unit(0.1) };
        assert_relative_eq!(eia_step_lower_bound(&b).unwrap(), 0.0625, max_relative = 1e-12);
        let near_one = eia_step_lower_bound(&BoundInputs { l: Some(1.0), lambda: 1.0 - 1e-12, ..unit(0.1) });
        assert!(near_one.unwrap() < 1e-11);
        assert!(matches!(eia_step_lower_bound(&unit(0.1)), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn eval_factors() {
        assert_relative_eq!(evals_per_iter_memory(2.0, 2.0).unwrap(), 1.0);
        assert_relative_eq!(eia_eval_factor(2.0, 2.0).unwrap(), 4.0);
        assert_relative_eq!(evals_per_iter_memory(2.0, 4.0).unwrap(), 1.5, max_relative = 1e-15);
        assert!(evals_per_iter_memory(1.0, 2.0).is_err());
    }

    #[test]
    fn gd_examples() {
        let e = std::f64::consts::E;
        let b = BoundInputs { m: Some(e), ..unit(0.1) };
        let lower = gd_bounds(&b).unwrap().lower.value().unwrap();
        assert_relative_eq!(lower, e * 0.9375 / 0.16, max_relative = 1e-12);
        assert_relative_eq!(lower, 15.93, max_relative = 1e-3);

        let b = BoundInputs { m: Some(2.0), ..unit(0.1) };
        assert_relative_eq!(gd_bounds(&b).unwrap().upper, 1200.0, max_relative = 1e-12);

        let b = BoundInputs { m: Some(2.0), delta: 0.0625, ..unit(0.1) };
        assert_eq!(gd_bounds(&b).unwrap().lower, BoundValue::Value(0.0));

        assert!(matches!(gd_bounds(&unit(0.1)), Err(Error::Inapplicable(_))));
        let b = BoundInputs { m: Some(0.5), ..unit(0.1) };
        assert!(matches!(gd_bounds(&b).unwrap().lower, BoundValue::Inapplicable(_)));
    }

    #[test]
    fn clipping_examples() {
        let c = clipping_bounds(&unit(0.1)).unwrap();
        assert_relative_eq!(c.standard, 2020.0, max_relative = 1e-12);
        assert_relative_eq!(c.refined, 3180.0, max_relative = 1e-12);
        assert_eq!(CLIP_REFINED_A, 1.06);
        assert!(clipping_bounds(&BoundInputs::new(0.0, 1.0, 1.0, 0.1)).is_err());
    }

    #[test]
    fn grad_eval_examples() {
        assert_relative_eq!(memory_armijo_grad_eval_bound(&unit(0.1)).unwrap(), 1600.0, max_relative = 1e-12);
        assert_eq!(memory_armijo_grad_eval_bound(&BoundInputs { delta: 0.0, ..unit(0.1) }).unwrap(), 0.0);
        let b = BoundInputs { f1: 3.0, ..unit(0.1) };
        assert!(matches!(memory_armijo_grad_eval_bound(&b), Err(Error::Inapplicable(_))));
        // at f2 = 2^4.5 the coefficient is 30, the refined clipping constant without A
        assert_relative_eq!(grad_eval_coefficient(2.0_f64.powf(4.5)).unwrap(), 30.0, max_relative = 1e-12);
        assert!(grad_eval_coefficient(20.0).unwrap() < 30.0 * CLIP_REFINED_A);
    }

    #[test]
    fn eia_symbolic_examples() {
        let expected = (2.0 / (0.99 * 0.5 * 0.25) + 2.0 * 2.0_f64.sqrt() * 8.0) / 0.1;
        let v = eia_complexity_bound_symbolic(0.25, 1.0, 0.1, 0.5, 1, 1.0).unwrap();
        assert_relative_eq!(v, expected, max_relative = 1e-12);
        assert_relative_eq!(v, 387.9, max_relative = 1e-3);
        let half = eia_complexity_bound_symbolic(0.25, 1.0, 0.05, 0.5, 1, 1.0).unwrap();
        assert_relative_eq!(half, 2.0 * v, max_relative = 1e-14);
        assert_eq!(eia_complexity_bound_symbolic(0.25, 0.0, 0.1, 0.5, 1, 0.0).unwrap(), 0.0);
        assert!(eia_complexity_bound_symbolic(0.0, 1.0, 0.1, 0.5, 1, 1.0).is_err());
    }

    #[test]
    fn report_marks_inapplicable_entries() {
        let r = BoundReport::evaluate("unit", &unit(0.1));
        let v = r.get("asymptotic_equiv").unwrap().value.value().unwrap();
        assert_relative_eq!(v, 800.0, max_relative = 1e-12);
        assert!(matches!(r.get("gd_upper_bound").unwrap().value, BoundValue::Inapplicable(_)));
        assert!(matches!(r.get("eia_step_lower_bound").unwrap().value, BoundValue::Inapplicable(_)));
        for e in &r.entries {
            if let BoundValue::Value(v) = e.value {
                assert!(v.is_finite() && v >= 0.0, "{}", e.name);
            }
        }
    }
}
