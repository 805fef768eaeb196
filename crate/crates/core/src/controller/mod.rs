//! Skip-update receding-horizon control: seeded episodes, exact evaluation
//! over the joint (true state, last observed state) chain, and Monte-Carlo
//! rollouts of the recorded policies.
//!
//! At an update time the agent first plans from the data gathered at earlier
//! updates, acts on the freshly observed state, and then records the new
//! transition. The plan made at `τ_k` drives every step up to `τ_{k+1} − 1`,
//! fed the last observed state during skips.

mod episode;
mod exact;
mod rollout;

use serde::{Deserialize, Serialize};

use crate::estimator::CmleOptions;
use crate::model::{MarkovPolicy, UpdateSchedule};
use crate::oracle::ValueTables;
use crate::planner::HorizonRule;

pub use episode::{run_episode, Episode, UpdateRecord};
pub use exact::{effective_policies, exact_evaluate, ExactEvaluation, JointDistribution};
pub use rollout::{monte_carlo, MonteCarloEstimate};

/// Which kernel the planner freezes at an update time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// Constrained MLE from the collected data, with uncertainty bonus.
    #[default]
    Learned,
    /// The true kernel at the update time, with zero uncertainty.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub beta: f64,
    pub h_bar: usize,
    pub horizon_rule: HorizonRule,
    pub cmle: CmleOptions,
    pub model: ModelSource,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            beta: 0.1,
            h_bar: 5,
            horizon_rule: HorizonRule::ToEnd,
            cmle: CmleOptions::default(),
            model: ModelSource::Learned,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub t: usize,
    pub is_update: bool,
    pub state: usize,
    /// State fed to the policy: `s_t` at updates, the last observed state otherwise.
    pub input: usize,
    pub action: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub initial_state: usize,
    pub steps: Vec<Step>,
    pub rewards: Vec<f64>,
}

impl Trajectory {
    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

/// The policy applied at each step, as a map from the policy input to actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutedPolicies {
    pub schedule: UpdateSchedule,
    pub policies: Vec<MarkovPolicy>,
}

impl ExecutedPolicies {
    pub fn horizon(&self) -> usize {
        self.policies.len()
    }
}

/// `k(t) = max{k : τ_k ≤ t}`.
pub fn last_update_index(schedule: &UpdateSchedule, t: usize) -> usize {
    schedule.last_update_index(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicRegret {
    /// `max_{s₀} (J*_T(s₀) − J^alg_T(s₀))`.
    pub value: f64,
    pub worst_start: usize,
    pub per_start: Vec<f64>,
}

pub fn dynamic_regret(tables: &ValueTables, eval: &ExactEvaluation) -> DynamicRegret {
    let per_start: Vec<f64> = tables
        .optimal_return()
        .iter()
        .zip(&eval.values)
        .map(|(v, j)| v - j)
        .collect();
    let mut worst_start = 0;
    for (s, &g) in per_start.iter().enumerate() {
        if g > per_start[worst_start] {
            worst_start = s;
        }
    }
    DynamicRegret {
        value: per_start[worst_start],
        worst_start,
        per_start,
    }
}
