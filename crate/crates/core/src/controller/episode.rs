use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AgentConfig, ExecutedPolicies, ModelSource, Step, Trajectory};
use crate::error::{Error, Result};
use crate::estimator::{
    forecast_uncertainty, solve_cmle, uncertainty_intervals, ChainEstimate, Transition, TransitionDataset,
    UncertaintyIntervals,
};
use crate::model::{ControlledKernel, MarkovPolicy, TvMdp, UpdateSchedule};
use crate::planner::{build_augmented_rewards, plan, planning_horizon, PlanArtifact};

/// Everything computed at one update time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateRecord {
    pub time: usize,
    /// Number of transitions the plan was built from.
    pub data_len: usize,
    pub estimate: Option<ChainEstimate>,
    /// Coordinate ranges at the latest data time (or the whole simplex without data).
    pub intervals: UncertaintyIntervals,
    /// `u_{t+h|t}` for `h ∈ [0, H_t)`.
    pub forecasts: Vec<UncertaintyIntervals>,
    pub plan: PlanArtifact,
}

impl UpdateRecord {
    /// The kernel `P̂_t` the plan holds fixed.
    pub fn kernel(&self) -> &ControlledKernel {
        &self.plan.kernel
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub trajectory: Trajectory,
    pub updates: Vec<UpdateRecord>,
    pub data: TransitionDataset,
    pub executed: ExecutedPolicies,
}

pub fn run_episode(
    mdp: &TvMdp,
    schedule: &UpdateSchedule,
    agent: &AgentConfig,
    initial_state: usize,
    seed: u64,
) -> Result<Episode> {
    mdp.ensure_valid()?;
    schedule.check(mdp.horizon())?;
    if initial_state >= mdp.n_states() {
        return Err(Error::invalid(format!("initial state {initial_state} out of range")));
    }
    if agent.h_bar == 0 {
        return Err(Error::invalid("planning cap H̄ must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trajectory = Trajectory {
        seed,
        initial_state,
        steps: Vec::with_capacity(mdp.horizon()),
        rewards: Vec::with_capacity(mdp.horizon()),
    };
    let mut data = TransitionDataset::new(mdp.n_states(), mdp.n_actions());
    let mut updates: Vec<UpdateRecord> = Vec::new();
    let mut policies: Vec<MarkovPolicy> = Vec::with_capacity(mdp.horizon());
    let (mut state, mut stale) = (initial_state, initial_state);
    for t in 0..mdp.horizon() {
        let is_update = schedule.is_update(t);
        if is_update {
            match update(mdp, agent, &data, t) {
                Ok(rec) => updates.push(rec),
                Err(e) => {
                    return Err(Error::Episode {
                        source: Box::new(e),
                        partial: Box::new(trajectory),
                    })
                }
            }
        }
        let policy = updates.last().expect("t = 0 is an update").plan.policy(0);
        let input = if is_update { state } else { stale };
        let action = sample(&mut rng, policy.action_probs(input));
        let next = sample(&mut rng, mdp.kernel(t).row(state, action));
        if is_update {
            data.push(Transition {
                time: t,
                state,
                action,
                next,
            })?;
            stale = next;
        }
        trajectory.steps.push(Step {
            t,
            is_update,
            state,
            input,
            action,
        });
        trajectory.rewards.push(mdp.reward(t).get(state, action));
        policies.push(policy);
        state = next;
    }
    Ok(Episode {
        trajectory,
        updates,
        data,
        executed: ExecutedPolicies {
            schedule: schedule.clone(),
            policies,
        },
    })
}

fn update(mdp: &TvMdp, agent: &AgentConfig, data: &TransitionDataset, t: usize) -> Result<UpdateRecord> {
    let (n, m) = (mdp.n_states(), mdp.n_actions());
    let horizon = planning_horizon(agent.horizon_rule, agent.h_bar, mdp.horizon(), t);
    let (kernel, estimate, intervals, forecasts) = match agent.model {
        ModelSource::Oracle => {
            let k = mdp.kernel(t).clone();
            let exact = UncertaintyIntervals::from_bounds(t, n, m, k.as_slice().to_vec(), k.as_slice().to_vec())?;
            let forecasts = (0..horizon)
                .map(|h| {
                    let mut f = exact.clone();
                    f.time = t + h;
                    f
                })
                .collect();
            (k, None, exact, forecasts)
        }
        ModelSource::Learned if data.is_empty() => {
            let full = UncertaintyIntervals::full(t, n, m);
            let forecasts = (0..horizon).map(|h| UncertaintyIntervals::full(t + h, n, m)).collect();
            (ControlledKernel::uniform(n, m), None, full, forecasts)
        }
        ModelSource::Learned => {
            let est = solve_cmle(data, mdp.drift(), &agent.cmle)?;
            let iv = uncertainty_intervals(data, mdp.drift(), &est)?;
            let forecasts = (0..horizon)
                .map(|h| forecast_uncertainty(&iv, mdp.drift(), t + h - iv.time))
                .collect::<Result<Vec<_>>>()?;
            (est.latest().clone(), Some(est), iv, forecasts)
        }
    };
    let rewards = build_augmented_rewards(mdp, &forecasts, t, horizon, agent.beta)?;
    let plan = plan(t, &kernel, rewards)?;
    Ok(UpdateRecord {
        time: t,
        data_len: data.len(),
        estimate,
        intervals,
        forecasts,
        plan,
    })
}

pub(crate) fn sample(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RewardTable;
    use crate::oracle::solve_oracle;

    fn drifting(horizon: usize) -> TvMdp {
        let kernels: Vec<ControlledKernel> = (0..horizon)
            .map(|t| {
                let p = 0.5 + 0.3 * (0.4 * t as f64).cos();
                ControlledKernel::from_fn(2, 2, |s, a, n| {
                    let q = if (s + a) % 2 == 0 { p } else { 1.0 - p };
                    if n == 0 { q } else { 1.0 - q }
                })
            })
            .collect();
        let rewards = vec![RewardTable::from_fn(2, 2, |s, a| s as f64 + 0.1 * a as f64); horizon];
        TvMdp::with_tight_drift(kernels, rewards).unwrap()
    }

    #[test]
    fn same_seed_same_trajectory() {
        let mdp = drifting(10);
        let sched = UpdateSchedule::periodic(3, 10).unwrap();
        let a = run_episode(&mdp, &sched, &AgentConfig::default(), 0, 42).unwrap();
        let b = run_episode(&mdp, &sched, &AgentConfig::default(), 0, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn data_only_at_update_times() {
        let mdp = drifting(9);
        let sched = UpdateSchedule::periodic(2, 9).unwrap();
        let ep = run_episode(&mdp, &sched, &AgentConfig::default(), 1, 7).unwrap();
        assert_eq!(ep.data.len(), 5);
        assert!(ep.data.triples().iter().all(|tr| tr.time % 2 == 0));
        assert_eq!(ep.updates.len(), 5);
        assert_eq!(ep.trajectory.steps.len(), 9);
    }

    #[test]
    fn skip_actions_depend_only_on_stale_state() {
        let mdp = drifting(12);
        let sched = UpdateSchedule::new(vec![0, 5, 9], 12).unwrap();
        let ep = run_episode(&mdp, &sched, &AgentConfig::default(), 0, 3).unwrap();
        let steps = &ep.trajectory.steps;
        for st in steps.iter().filter(|s| !s.is_update) {
            let k = sched.last_update_index(st.t);
            let tau = sched.time(k);
            assert_eq!(st.input, steps[tau + 1].state);
            let plan = &ep.updates[k].plan;
            assert_eq!(st.action, plan.actions[0][st.input]);
            // Any other true state with the same stale input gives the same action.
            assert_eq!(ep.executed.policies[st.t], plan.policy(0));
        }
    }

    #[test]
    fn oracle_model_on_deterministic_stationary_instance_matches_oracle_rollout() {
        let k = ControlledKernel::from_fn(3, 2, |s, a, n| if n == (s + a + 1) % 3 { 1.0 } else { 0.0 });
        let r = RewardTable::from_fn(3, 2, |s, a| (s * 2 + a) as f64 * 0.3);
        let mdp = TvMdp::with_tight_drift(vec![k; 6], vec![r; 6]).unwrap();
        let agent = AgentConfig {
            h_bar: 10,
            model: ModelSource::Oracle,
            ..AgentConfig::default()
        };
        let oracle = solve_oracle(&mdp).unwrap();
        for s0 in 0..3 {
            let ep = run_episode(&mdp, &UpdateSchedule::every_step(6).unwrap(), &agent, s0, 1).unwrap();
            assert!((ep.trajectory.total_reward() - oracle.value(0)[s0]).abs() < 1e-12);
        }
    }
}
