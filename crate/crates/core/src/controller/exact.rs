use serde::{Deserialize, Serialize};

use super::ExecutedPolicies;
use crate::error::{Error, Result};
use crate::model::{MarkovPolicy, TvMdp};

const MASS_TOL: f64 = 1e-9;

/// `μ_t(s, ŝ) = Pr(s_t = s, last observed = ŝ)`, flattened by `s · S + ŝ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub t: usize,
    pub n_states: usize,
    pub mass: Vec<f64>,
}

impl JointDistribution {
    pub fn get(&self, s: usize, stale: usize) -> f64 {
        self.mass[s * self.n_states + stale]
    }

    /// `Pr(s_t = s)`.
    pub fn marginal(&self) -> Vec<f64> {
        self.mass.chunks(self.n_states).map(|row| row.iter().sum()).collect()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactEvaluation {
    /// `J^alg_T(s₀)`.
    pub values: Vec<f64>,
    /// `E[r_t]` per start state and step.
    pub expected_rewards: Vec<Vec<f64>>,
    /// `μ_t` per start state for `t ∈ [0, T)`.
    pub joints: Vec<Vec<JointDistribution>>,
}

pub fn exact_evaluate(mdp: &TvMdp, executed: &ExecutedPolicies) -> Result<ExactEvaluation> {
    let horizon = mdp.horizon();
    if executed.horizon() != horizon {
        return Err(Error::invalid(format!(
            "{} executed policies for horizon {horizon}",
            executed.horizon()
        )));
    }
    executed.schedule.check(horizon)?;
    let n = mdp.n_states();
    let mut values = Vec::with_capacity(n);
    let mut expected_rewards = Vec::with_capacity(n);
    let mut joints = Vec::with_capacity(n);
    for s0 in 0..n {
        let mut mu = vec![0.0; n * n];
        mu[s0 * n + s0] = 1.0;
        let mut rewards = Vec::with_capacity(horizon);
        let mut history = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let is_update = executed.schedule.is_update(t);
            let (kernel, reward, policy) = (mdp.kernel(t), mdp.reward(t), &executed.policies[t]);
            let mut next = vec![0.0; n * n];
            let mut er = 0.0;
            for s in 0..n {
                for stale in 0..n {
                    let w = mu[s * n + stale];
                    if w == 0.0 {
                        continue;
                    }
                    let input = if is_update { s } else { stale };
                    for a in 0..mdp.n_actions() {
                        let wa = w * policy.prob(input, a);
                        if wa == 0.0 {
                            continue;
                        }
                        er += wa * reward.get(s, a);
                        for (s2, &p) in kernel.row(s, a).iter().enumerate() {
                            let obs = if is_update { s2 } else { stale };
                            next[s2 * n + obs] += wa * p;
                        }
                    }
                }
            }
            let total: f64 = next.iter().sum();
            if (total - 1.0).abs() > MASS_TOL {
                return Err(Error::InternalConsistency(format!(
                    "joint distribution mass {total} at t = {} from s0 = {s0}",
                    t + 1
                )));
            }
            rewards.push(er);
            history.push(JointDistribution { t, n_states: n, mass: mu });
            mu = next;
        }
        values.push(rewards.iter().sum());
        expected_rewards.push(rewards);
        joints.push(history);
    }
    Ok(ExactEvaluation {
        values,
        expected_rewards,
        joints,
    })
}

/// `π̃_t(a | s) = Pr(a_t = a | s_t = s)` under a uniform start distribution.
/// Unreached states fall back to the executed policy at `s`.
pub fn effective_policies(eval: &ExactEvaluation, executed: &ExecutedPolicies) -> Result<Vec<MarkovPolicy>> {
    let n = eval.values.len();
    let mut out = Vec::with_capacity(executed.horizon());
    for (t, policy) in executed.policies.iter().enumerate() {
        let m = policy.n_actions();
        let is_update = executed.schedule.is_update(t);
        let mut probs = vec![0.0; n * m];
        for s in 0..n {
            let mut mass = 0.0;
            let mut row = vec![0.0; m];
            for joint in eval.joints.iter().map(|j| &j[t]) {
                for stale in 0..n {
                    let w = joint.get(s, stale);
                    if w > 0.0 {
                        let input = if is_update { s } else { stale };
                        mass += w;
                        for (a, r) in row.iter_mut().enumerate() {
                            *r += w * policy.prob(input, a);
                        }
                    }
                }
            }
            if mass > 0.0 {
                let z: f64 = row.iter().sum();
                for (a, r) in row.iter().enumerate() {
                    probs[s * m + a] = r / z;
                }
            } else {
                probs[s * m..(s + 1) * m].copy_from_slice(policy.action_probs(s));
            }
        }
        out.push(MarkovPolicy::new(n, m, probs)?);
    }
    Ok(out)
}
