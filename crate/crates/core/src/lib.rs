//! Inference for the log-logistic lifetime distribution.
//!
//! Point estimates by probability-plot least squares and maximum likelihood,
//! and confidence intervals for the reliability function `R(t)` from
//! LSE-based generalized pivotal quantities, the parametric bootstrap, and
//! delta-method Wald intervals. [`harness`] runs coverage studies over
//! simulated samples.

pub mod classical;
pub mod data;
pub mod dist;
pub mod error;
pub mod estimation;
pub mod gof;
pub mod gpq;
pub mod harness;
pub mod interval;
pub mod io;
pub mod quantile;
pub mod report;

pub use dist::{LocScaleParams, LogLogisticParams, Seed};
pub use error::{Error, ErrorKind, Result};
pub use estimation::{FitMethod, FitResult, Sample, Status};
pub use interval::{IntervalEstimate, IntervalMethod, Target};
