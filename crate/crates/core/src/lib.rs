//! Tabular time-varying MDPs: exact oracle, constrained estimation of drifting
//! kernels, skip-update receding-horizon control, and the regret calculus that
//! ties them together.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: instances, policies, schedules, span and total variation.
//! * [`oracle`]: backward induction and mixing certificates.
//! * [`estimator`]: constrained MLE, coordinate ranges, forecasts.
//! * [`planner`]: planning on the frozen estimated kernel.
//! * [`controller`]: episodes, exact evaluation, Monte-Carlo rollouts.
//! * [`analysis`]: regret decomposition, regret bound, checks of the supporting inequalities.
//! * [`experiment`]: scenarios, configs, runs, sweeps and their output files.

pub mod analysis;
pub mod controller;
mod dp;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod model;
pub mod oracle;
pub mod planner;

pub use error::{Error, Result};
