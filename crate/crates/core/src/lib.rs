//! Armijo-type first-order optimizers with evaluation counting, the
//! closed-form complexity bounds they are compared against, and numerical
//! audits of the underlying inequalities.
//!
//! Everything is generic over a [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI and the
//! verification suite use.

// `!(a > b)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod linesearch;
pub mod optimizers;
pub mod output;
pub mod point;
pub mod problems;
pub mod scalar;
pub mod suite;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use linesearch::{eia_step, memory_armijo_step, LineSearchConfig, LineSearchOutcome};
pub use optimizers::{
    run, run_clipped_gd, run_eia, run_gd, run_memory_armijo, ClipSchedule, ClipStop, OptimizerConfig,
    OptimizerKind,
};
pub use point::{grad_norm, Point};
pub use problems::{KnownConstants, Objective, Problem};
pub use scalar::Scalar;
pub use trace::{EvalCounters, IterationRecord, RunSummary, RunTrace, Termination};

pub type Point64 = point::Point<f64>;
pub type Point32 = point::Point<f32>;
pub type Problem64 = problems::Problem<f64>;
pub type Problem32 = problems::Problem<f32>;
pub type RunTrace64 = trace::RunTrace<f64>;
pub type LineSearchConfig64 = linesearch::LineSearchConfig<f64>;
pub type OptimizerConfig64 = optimizers::OptimizerConfig<f64>;
pub type BoundInputs64 = bounds::BoundInputs<f64>;
