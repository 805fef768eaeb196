//! Regret accounting: the exact per-step decomposition, the error terms that
//! enter the regret bound, the bound itself, and numerical checks of the two
//! supporting inequalities.

mod bound;
mod decomposition;
mod diagnostics;
mod propagation;
mod terms;

pub use bound::{update_step_check, regret_bound, BoundBreakdown, UpdateStepRow, StepBound, UpdateBound};
pub use decomposition::{per_step_regret, RegretDecomposition};
pub use diagnostics::{skip_diagnostics, SkipDiagnostics};
pub use propagation::{propagation_check, PropagationReport};
pub use terms::{model_error_terms, variation_terms, ModelErrorTerms, VariationTerms};

use crate::model::{tv_unchecked, ControlledKernel};

/// `max_{s,a} ‖P(·|s,a) − P′(·|s,a)‖_tv`.
pub(crate) fn max_tv(p: &ControlledKernel, q: &ControlledKernel) -> f64 {
    let mut worst = 0.0f64;
    for s in 0..p.n_states() {
        for a in 0..p.n_actions() {
            worst = worst.max(tv_unchecked(p.row(s, a), q.row(s, a)));
        }
    }
    worst
}
