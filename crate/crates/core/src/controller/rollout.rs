use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::episode::sample;
use super::ExecutedPolicies;
use crate::error::{Error, Result};
use crate::model::TvMdp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub rollouts: usize,
}

/// Seeded rollouts of the recorded policies from a fixed start state.
pub fn monte_carlo(
    mdp: &TvMdp,
    executed: &ExecutedPolicies,
    initial_state: usize,
    rollouts: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if rollouts < 2 {
        return Err(Error::invalid("Monte-Carlo estimate needs at least two rollouts"));
    }
    if initial_state >= mdp.n_states() || executed.horizon() != mdp.horizon() {
        return Err(Error::invalid("rollout inputs disagree with the instance"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..rollouts {
        let (mut s, mut stale, mut total) = (initial_state, initial_state, 0.0);
        for t in 0..mdp.horizon() {
            let is_update = executed.schedule.is_update(t);
            let input = if is_update { s } else { stale };
            let a = sample(&mut rng, executed.policies[t].action_probs(input));
            total += mdp.reward(t).get(s, a);
            let next = sample(&mut rng, mdp.kernel(t).row(s, a));
            if is_update {
                stale = next;
            }
            s = next;
        }
        sum += total;
        sum_sq += total * total;
    }
    let n = rollouts as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        stderr: (var / n).sqrt(),
        rollouts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::exact_evaluate;
    use crate::model::{ControlledKernel, MarkovPolicy, RewardTable, UpdateSchedule};

    #[test]
    fn agrees_with_exact_value() {
        let kernels: Vec<_> = (0..8)
            .map(|t| {
                let p = 0.3 + 0.05 * t as f64;
                ControlledKernel::from_fn(2, 2, |s, a, n| {
                    let q = if s == a { p } else { 1.0 - p };
                    if n == 0 { q } else { 1.0 - q }
                })
            })
            .collect();
        let mdp = TvMdp::with_tight_drift(kernels, vec![RewardTable::from_fn(2, 2, |s, a| (s + 2 * a) as f64); 8]).unwrap();
        let exec = ExecutedPolicies {
            schedule: UpdateSchedule::periodic(3, 8).unwrap(),
            policies: vec![MarkovPolicy::new(2, 2, vec![0.3, 0.7, 1.0, 0.0]).unwrap(); 8],
        };
        let exact = exact_evaluate(&mdp, &exec).unwrap();
        for s0 in 0..2 {
            let mc = monte_carlo(&mdp, &exec, s0, 20_000, 5).unwrap();
            assert!((mc.mean - exact.values[s0]).abs() < 4.0 * mc.stderr);
        }
        assert_eq!(monte_carlo(&mdp, &exec, 0, 100, 9).unwrap(), monte_carlo(&mdp, &exec, 0, 100, 9).unwrap());
    }
}
