//! CSV and JSON renderings of traces, summaries and sweeps.
//!
//! Reals are written with 17 significant digits in scientific notation,
//! `.` as decimal separator and `\n` line endings, so identical runs give
//! byte-identical files.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::trace::RunTrace;

pub const TRACE_HEADER: &str = "iter,r_value,grad_norm,eta,backtracks,func_evals,grad_evals";
pub const SWEEP_HEADER: &str = "eps,iterations,bound,func_evals,grad_evals,bound_evals";

/// 17 significant digits, e.g. `1.0000000000000000e-3`.
pub fn format_real<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

pub fn trace_csv<T: Scalar>(trace: &RunTrace<T>) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter,
            format_real(r.r_value),
            format_real(r.grad_norm),
            format_real(r.eta),
            r.backtracks,
            r.counters.func_evals,
            r.counters.grad_evals
        );
    }
    out
}

pub fn write_trace_csv<T: Scalar, W: Write>(trace: &RunTrace<T>, mut w: W) -> io::Result<()> {
    w.write_all(trace_csv(trace).as_bytes())
}

/// One line of an ε sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub iterations: usize,
    /// Iteration bound, when one applies to the optimizer and problem.
    pub bound: Option<f64>,
    pub func_evals: u64,
    pub grad_evals: u64,
    /// Bound on gradient-equivalent evaluations.
    pub bound_evals: Option<f64>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_real(r.eps),
            r.iterations,
            opt(r.bound),
            r.func_evals,
            r.grad_evals,
            opt(r.bound_evals)
        );
    }
    out
}
