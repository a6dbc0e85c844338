//! Test functions with analytic gradients and, where available, exactly
//! known smoothness constants.
//!
//! | name         | R(θ)                                        | known constants            |
//! |--------------|---------------------------------------------|----------------------------|
//! | `quadratic`  | ½ Σ dᵢθᵢ²                                   | L = L0 = max dᵢ, L1 = 0    |
//! | `cosh`       | Σ cosh θᵢ                                   | L0 = L1 = 1, R* = N        |
//! | `nesterov`   | θ₁² + Σ (θᵢ − θᵢ₊₁)² + θ_N², N odd          | L = 4(1 + cos(π/(N+1)))    |
//! | `doublewell` | (x² − 1)²                                   | critical values {0, 1}     |
//! | `rosenbrock` | Σ 100(θᵢ₊₁ − θᵢ²)² + (1 − θᵢ)²              | R* = 0                     |
//!
//! For `cosh`, ‖∇²R(θ)‖ = maxᵢ cosh θᵢ ≤ 1 + maxᵢ |sinh θᵢ| ≤ 1 + ‖∇R(θ)‖, so
//! the function is (1, 1)-smooth on all of ℝᴺ.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::Scalar;
use crate::trace::EvalCounters;

/// Objective with an analytic gradient. Implementations must be pure.
pub trait Objective<T: Scalar>: Send + Sync {
    fn value(&self, x: &[T]) -> T;

    /// Writes ∇R(x) into `out` (same length as `x`).
    fn gradient(&self, x: &[T], out: &mut [T]);

    /// Exact supremum of ‖∇R‖ over the sublevel set {R ≤ level}, when it
    /// has a closed form.
    fn sublevel_grad_sup(&self, _level: T) -> Option<T> {
        None
    }
}

/// Constants known analytically for a problem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KnownConstants<T: Scalar = f64> {
    pub l0: Option<T>,
    pub l1: Option<T>,
    /// Global Lipschitz constant of the gradient.
    pub lipschitz: Option<T>,
    /// inf R.
    pub r_star: Option<T>,
    /// Sorted critical values on the region of interest.
    pub critical_values: Option<Vec<T>>,
}

impl<T: Scalar> KnownConstants<T> {
    /// `L1 == 0`: the problem has a plain Lipschitz gradient.
    pub fn is_classically_smooth(&self) -> bool {
        self.l1.is_some_and(|l1| l1 == T::zero())
    }
}

#[derive(Clone)]
pub struct Problem<T: Scalar = f64> {
    name: String,
    dim: usize,
    objective: Arc<dyn Objective<T>>,
    known: KnownConstants<T>,
}

impl<T: Scalar> fmt::Debug for Problem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("known", &self.known)
            .finish()
    }
}

impl<T: Scalar> Problem<T> {
    pub fn from_objective(
        name: impl Into<String>,
        dim: usize,
        objective: impl Objective<T> + 'static,
        known: KnownConstants<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidProblem("dimension must be at least 1".into()));
        }
        Ok(Self { name: name.into(), dim, objective: Arc::new(objective), known })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn known(&self) -> &KnownConstants<T> {
        &self.known
    }

    /// R(x) without touching any counter.
    pub fn value(&self, x: &Point<T>) -> T {
        debug_assert_eq!(x.dim(), self.dim);
        self.objective.value(x.as_slice())
    }

    /// ∇R(x) without touching any counter.
    pub fn gradient(&self, x: &Point<T>) -> Vec<T> {
        debug_assert_eq!(x.dim(), self.dim);
        let mut out = vec![T::zero(); self.dim];
        self.objective.gradient(x.as_slice(), &mut out);
        out
    }

    pub fn value_counted(&self, x: &Point<T>, counters: &mut EvalCounters) -> T {
        counters.bump_func();
        self.value(x)
    }

    pub fn gradient_counted(&self, x: &Point<T>, counters: &mut EvalCounters) -> Vec<T> {
        counters.bump_grad();
        self.gradient(x)
    }

    pub fn sublevel_grad_sup(&self, level: T) -> Option<T> {
        self.objective.sublevel_grad_sup(level)
    }

    pub(crate) fn check_point(&self, x: &Point<T>) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::InvalidInput(format!(
                "point has dimension {} but problem {} has dimension {}",
                x.dim(),
                self.name,
                self.dim
            )));
        }
        Ok(())
    }
}

struct Quadratic<T> {
    diag: Vec<T>,
}

impl<T: Scalar> Objective<T> for Quadratic<T> {
    fn value(&self, x: &[T]) -> T {
        let half = T::lit(0.5);
        x.iter().zip(&self.diag).fold(T::zero(), |acc, (&xi, &d)| acc + half * d * xi * xi)
    }

    fn gradient(&self, x: &[T], out: &mut [T]) {
        for ((o, &xi), &d) in out.iter_mut().zip(x).zip(&self.diag) {
            *o = d * xi;
        }
    }

    fn sublevel_grad_sup(&self, level: T) -> Option<T> {
        let dmax = self.diag.iter().copied().fold(T::zero(), T::max);
        Some((T::lit(2.0) * level.max(T::zero()) * dmax).sqrt())
    }
}

/// ½ Σ dᵢθᵢ² with strictly positive `diag`.
pub fn make_quadratic<T: Scalar>(diag: &[T]) -> Result<Problem<T>> {
    if diag.is_empty() {
        return Err(Error::InvalidProblem("quadratic needs at least one diagonal entry".into()));
    }
    if let Some(d) = diag.iter().find(|d| !(**d > T::zero()) || !d.is_finite()) {
        return Err(Error::InvalidProblem(format!("diagonal entries must be positive, got {d}")));
    }
    let l = diag.iter().copied().fold(T::zero(), T::max);
    let known = KnownConstants {
        l0: Some(l),
        l1: Some(T::zero()),
        lipschitz: Some(l),
        r_star: Some(T::zero()),
        critical_values: Some(vec![T::zero()]),
    };
    Problem::from_objective("quadratic", diag.len(), Quadratic { diag: diag.to_vec() }, known)
}

struct CoshSum;

impl<T: Scalar> Objective<T> for CoshSum {
    fn value(&self, x: &[T]) -> T {
        x.iter().fold(T::zero(), |acc, &xi| acc + xi.cosh())
    }

    fn gradient(&self, x: &[T], out: &mut [T]) {
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = xi.sinh();
        }
    }
}

struct CoshSumN {
    dim: usize,
}

impl<T: Scalar> Objective<T> for CoshSumN {
    fn value(&self, x: &[T]) -> T {
        CoshSum.value(x)
    }

    fn gradient(&self, x: &[T], out: &mut [T]) {
        CoshSum.gradient(x, out)
    }

    // Maximising Σ sinh²θᵢ = Σ (cosh²θᵢ − 1) under Σ cosh θᵢ ≤ level (all
    // cosh θᵢ ≥ 1) puts the whole excess on one coordinate.
    fn sublevel_grad_sup(&self, level: T) -> Option<T> {
        let peak = level - T::from_usize(self.dim - 1)?;
        (peak >= T::one()).then(|| (peak * peak - T::one()).sqrt())
    }
}

/// Σ cosh θᵢ, (L0, L1) = (1, 1).
pub fn make_cosh_sum<T: Scalar>(dim: usize) -> Result<Problem<T>> {
    if dim == 0 {
        return Err(Error::InvalidProblem("cosh needs dim >= 1".into()));
    }
    let n = T::from_usize(dim).ok_or_else(|| Error::InvalidProblem("dim too large".into()))?;
    let known = KnownConstants {
        l0: Some(T::one()),
        l1: Some(T::one()),
        lipschitz: None,
        r_star: Some(n),
        critical_values: Some(vec![n]),
    };
    Problem::from_objective("cosh", dim, CoshSumN { dim }, known)
}

struct NesterovWorst {
    lipschitz: f64,
}

impl<T: Scalar> Objective<T> for NesterovWorst {
    fn value(&self, x: &[T]) -> T {
        let n = x.len();
        let ends = x[0] * x[0] + x[n - 1] * x[n - 1];
        x.windows(2).fold(ends, |acc, w| acc + (w[0] - w[1]) * (w[0] - w[1]))
    }

    fn gradient(&self, x: &[T], out: &mut [T]) {
        let two = T::lit(2.0);
        let n = x.len();
        out.iter_mut().for_each(|o| *o = T::zero());
        out[0] = two * x[0];
        out[n - 1] = out[n - 1] + two * x[n - 1];
        for i in 0..n - 1 {
            let d = two * (x[i] - x[i + 1]);
            out[i] = out[i] + d;
            out[i + 1] = out[i + 1] - d;
        }
    }

    // R = ½θᵀHθ with H ⪰ 0, so ‖Hθ‖² ≤ λmax(H)·θᵀHθ = 2L·R.
    fn sublevel_grad_sup(&self, level: T) -> Option<T> {
        Some((T::lit(2.0 * self.lipschitz) * level.max(T::zero())).sqrt())
    }
}

/// Nesterov's worst-case quadratic in odd dimension `dim >= 3`.
pub fn make_nesterov_worst<T: Scalar>(dim: usize) -> Result<Problem<T>> {
    if dim < 3 || dim.is_multiple_of(2) {
        return Err(Error::InvalidProblem(format!("nesterov needs an odd dimension >= 3, got {dim}")));
    }
    // Hessian 2·tridiag(−1, 2, −1); largest eigenvalue 4(1 + cos(π/(N+1))).
    let lipschitz = 4.0 * (1.0 + (std::f64::consts::PI / (dim as f64 + 1.0)).cos());
    let known = KnownConstants {
        l0: Some(T::lit(lipschitz)),
        l1: Some(T::zero()),
        lipschitz: Some(T::lit(lipschitz)),
        r_star: Some(T::zero()),
        critical_values: Some(vec![T::zero()]),
    };
    Problem::from_objective("nesterov", dim, NesterovWorst { lipschitz }, known)
}

struct DoubleWell;

impl<T: Scalar> Objective<T> for DoubleWell {
    fn value(&self, x: &[T]) -> T {
        let s = x[0] * x[0] - T::one();
        s * s
    }

    fn gradient(&self, x: &[T], out: &mut [T]) {
        out[0] = T::lit(4.0) * x[0] * (x[0] * x[0] - T::one());
    }
}

/// (x² − 1)²: minima at ±1 (value 0), local maximum at 0 (value 1).
pub fn make_double_well<T: Scalar>() -> Result<Problem<T>> {
    let known = KnownConstants {
        l0: None,
        l1: None,
        lipschitz: None,
        r_star: Some(T::zero()),
        critical_values: Some(vec![T::zero(), T::one()]),
    };
    Problem::from_objective("doublewell", 1, DoubleWell, known)
}

struct Rosenbrock;

impl<T: Scalar> Objective<T> for Rosenbrock {
    fn value(&self, x: &[T]) -> T {
        let hundred = T::lit(100.0);
        x.windows(2).fold(T::zero(), |acc, w| {
            let a = w[1] - w[0] * w[0];
            let b = T::one() - w[0];
            acc + hundred * a * a + b * b
        })
    }

    fn gradient(&self, x: &[T], out: &mut [T]) {
        let two = T::lit(2.0);
        let c200 = T::lit(200.0);
        let c400 = T::lit(400.0);
        out.iter_mut().for_each(|o| *o = T::zero());
        for i in 0..x.len() - 1 {
            let a = x[i + 1] - x[i] * x[i];
            out[i] = out[i] - c400 * x[i] * a - two * (T::one() - x[i]);
            out[i + 1] = out[i + 1] + c200 * a;
        }
    }
}

pub fn make_rosenbrock<T: Scalar>(dim: usize) -> Result<Problem<T>> {
    if dim < 2 {
        return Err(Error::InvalidProblem(format!("rosenbrock needs dim >= 2, got {dim}")));
    }
    let known = KnownConstants { r_star: Some(T::zero()), ..KnownConstants::default() };
    Problem::from_objective("rosenbrock", dim, Rosenbrock, known)
}

/// Names accepted by [`problem_by_name`].
pub const PROBLEM_NAMES: [&str; 5] = ["quadratic", "cosh", "nesterov", "doublewell", "rosenbrock"];

/// Builds a problem from its CLI name. `quadratic` takes `diag`; `cosh`,
/// `nesterov` and `rosenbrock` take `dim`.
pub fn problem_by_name<T: Scalar>(name: &str, dim: Option<usize>, diag: Option<&[T]>) -> Result<Problem<T>> {
    let need_dim =
        || dim.ok_or_else(|| Error::InvalidProblem(format!("problem {name} requires a dimension")));
    match name {
        "quadratic" => {
            let diag = diag
                .ok_or_else(|| Error::InvalidProblem("problem quadratic requires diagonal entries".into()))?;
            let p = make_quadratic(diag)?;
            if let Some(d) = dim {
                if d != p.dim() {
                    return Err(Error::InvalidProblem(format!(
                        "dim {d} does not match {} diagonal entries",
                        p.dim()
                    )));
                }
            }
            Ok(p)
        }
        "cosh" => make_cosh_sum(need_dim()?),
        "nesterov" => make_nesterov_worst(need_dim()?),
        "doublewell" => match dim {
            None | Some(1) => make_double_well(),
            Some(d) => Err(Error::InvalidProblem(format!("doublewell is 1-D, got dim {d}"))),
        },
        "rosenbrock" => make_rosenbrock(need_dim()?),
        other => Err(Error::InvalidProblem(format!(
            "unknown problem {other:?}; expected one of {}",
            PROBLEM_NAMES.join(", ")
        ))),
    }
}
