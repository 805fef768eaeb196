//! Finite time-varying MDPs and the kernel calculus shared by every other
//! module: span seminorm, total variation, policy-induced kernels and
//! multi-step composition.

mod kernel;
mod metrics;
mod policy;
mod schedule;
mod tvmdp;
mod validate;

pub use kernel::{compose_kernels, ControlledKernel, RewardTable, StateKernel};
pub use metrics::{span, tv_distance};
pub(crate) use metrics::{span_unchecked, tv_unchecked};
pub use policy::{apply_policy_kernel, MarkovPolicy};
pub use schedule::UpdateSchedule;
pub use tvmdp::TvMdp;
pub use validate::{validate_instance, ValidationReport, Violation};

/// Row sums of stochastic tables must match 1 within this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Slack added to the drift bound when validating instances.
pub const DRIFT_SLACK: f64 = 1e-12;
