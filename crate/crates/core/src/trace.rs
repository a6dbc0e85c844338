//! Evaluation counters and per-iteration run traces.

use serde::{Deserialize, Serialize};

use crate::point::Point;
use crate::scalar::Scalar;

/// Number of objective and gradient evaluations consumed by one run.
///
/// Owned by a single run and only ever incremented.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounters {
    pub func_evals: u64,
    pub grad_evals: u64,
}

impl EvalCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn bump_func(&mut self) {
        self.func_evals += 1;
    }

    pub(crate) fn bump_grad(&mut self) {
        self.grad_evals += 1;
    }

    /// Component-wise difference `self - earlier`.
    pub fn since(&self, earlier: &EvalCounters) -> EvalCounters {
        EvalCounters {
            func_evals: self.func_evals - earlier.func_evals,
            grad_evals: self.grad_evals - earlier.grad_evals,
        }
    }
}

/// State of the iterate `theta_iter` together with the step that produced it.
///
/// Record 0 describes the starting point: its `eta` is the first trial step
/// (or the fixed step for constant-step methods) and `backtracks` is 0. For
/// `iter >= 1`, `eta` is the accepted step `theta_{iter-1} -> theta_iter`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<T: Scalar = f64> {
    pub iter: usize,
    pub r_value: T,
    pub grad_norm: T,
    pub eta: T,
    pub backtracks: usize,
    pub counters: EvalCounters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    GradBelowEps,
    MaxIter,
    StepUnderflow,
    /// Clipped GD stopped on the running average of gradient norms.
    AverageGradBelowTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<T: Scalar = f64> {
    pub records: Vec<IterationRecord<T>>,
    pub terminated_by: Termination,
    pub final_point: Point<T>,
    /// Running mean `(1/n) sum_{k=1..n} |grad R(theta_k)|`; entry `n - 1`
    /// holds the mean for `n`. Only filled by clipped GD.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub running_average: Vec<T>,
}

impl<T: Scalar> RunTrace<T> {
    /// Number of outer iterations, i.e. accepted steps.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn last(&self) -> &IterationRecord<T> {
        self.records.last().expect("trace has at least the initial record")
    }

    pub fn counters(&self) -> EvalCounters {
        self.last().counters
    }

    /// Whether `r_value` never increases between consecutive records.
    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].r_value <= w[0].r_value)
    }

    /// Smallest gradient norm among the first `n` records.
    pub fn min_grad_norm_prefix(&self, n: usize) -> Option<T> {
        self.records[..n.min(self.records.len())].iter().map(|r| r.grad_norm).reduce(T::min)
    }

    pub fn summary(&self) -> RunSummary<T> {
        let last = self.last();
        RunSummary {
            terminated_by: self.terminated_by,
            iterations: self.iterations(),
            final_grad_norm: last.grad_norm,
            final_r: last.r_value,
            counters: last.counters,
        }
    }
}

/// Compact end-of-run summary written next to the trace CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary<T: Scalar = f64> {
    pub terminated_by: Termination,
    pub iterations: usize,
    pub final_grad_norm: T,
    pub final_r: T,
    pub counters: EvalCounters,
}
