//! Independent reference computations for `tvmdp` and the acceptance
//! criteria built on them.
//!
//! [`oracles`] holds brute-force versions of the library's exact routines,
//! [`instances`] the seeded random instances they are compared on, and
//! [`criteria`] the ten pass/fail checks. [`run_all`] runs every criterion
//! and times the whole suite.

pub mod criteria;
pub mod instances;
pub mod oracles;

pub use criteria::{run_all, CriterionOutcome};
