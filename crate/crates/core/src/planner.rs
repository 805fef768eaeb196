//! Finite-horizon planning on the auxiliary MDP: the estimated kernel is held
//! fixed and rewards carry the forecast uncertainty bonus.

use serde::{Deserialize, Serialize};

use crate::dp;
use crate::error::{Error, Result};
use crate::estimator::UncertaintyIntervals;
use crate::model::{span_unchecked, ControlledKernel, MarkovPolicy, RewardTable, TvMdp, ROW_SUM_TOL};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonRule {
    /// `H_t = min(H̄, T − t)`.
    #[default]
    ToEnd,
    /// `H_t = max(1, min(H̄, T − 1 − t))`; the floor keeps the last step plannable.
    BeforeEnd,
}

pub fn planning_horizon(rule: HorizonRule, h_bar: usize, horizon: usize, t: usize) -> usize {
    match rule {
        HorizonRule::ToEnd => h_bar.min(horizon - t),
        HorizonRule::BeforeEnd => h_bar.min(horizon - 1 - t).max(1),
    }
}

/// `r^{(β)}_{t,h} = r_{t+h} + β u_{t+h|t}` for `h ∈ [0, H)`.
pub fn build_augmented_rewards(
    mdp: &TvMdp,
    forecasts: &[UncertaintyIntervals],
    t: usize,
    horizon: usize,
    beta: f64,
) -> Result<Vec<RewardTable>> {
    if !(beta >= 0.0) {
        return Err(Error::invalid("bonus weight β must be nonnegative"));
    }
    if forecasts.len() < horizon {
        return Err(Error::invalid(format!(
            "need {horizon} forecasts, got {}",
            forecasts.len()
        )));
    }
    if t + horizon > mdp.horizon() {
        return Err(Error::invalid("planning window exceeds the horizon"));
    }
    let (n, m) = (mdp.n_states(), mdp.n_actions());
    Ok((0..horizon)
        .map(|h| {
            let r = mdp.reward(t + h);
            let u = &forecasts[h];
            RewardTable::from_fn(n, m, |s, a| r.get(s, a) + beta * u.diameter(s, a))
        })
        .collect())
}

/// Output of one planning call at update time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanArtifact {
    pub time: usize,
    pub horizon: usize,
    pub kernel: ControlledKernel,
    pub rewards: Vec<RewardTable>,
    /// `Ŵ_{t,h}` for `h ∈ [0, H]`.
    pub w: Vec<Vec<f64>>,
    /// `Ẑ_{t,h}(s, a)` flattened by `s · A + a`.
    pub z: Vec<Vec<f64>>,
    pub actions: Vec<Vec<usize>>,
    /// `W̃_t = max_h sp(Ŵ_{t,h})`.
    pub w_span: f64,
}

impl PlanArtifact {
    pub fn policy(&self, h: usize) -> MarkovPolicy {
        MarkovPolicy::deterministic(&self.actions[h], self.kernel.n_actions()).expect("planned actions in range")
    }

    pub fn z_row(&self, h: usize, s: usize) -> &[f64] {
        let m = self.kernel.n_actions();
        &self.z[h][s * m..(s + 1) * m]
    }
}

pub fn plan(time: usize, kernel: &ControlledKernel, rewards: Vec<RewardTable>) -> Result<PlanArtifact> {
    let horizon = rewards.len();
    if horizon == 0 {
        return Err(Error::invalid("planning horizon must be at least 1"));
    }
    let (n, m) = (kernel.n_states(), kernel.n_actions());
    if rewards.iter().any(|r| r.n_states() != n || r.n_actions() != m) {
        return Err(Error::invalid("reward tables disagree with the kernel"));
    }
    for s in 0..n {
        for a in 0..m {
            let row = kernel.row(s, a);
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (row.iter().sum::<f64>() - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::invalid(format!("planning kernel row ({s}, {a}) is not a distribution")));
            }
        }
    }
    let b = dp::backward(n, m, horizon, |_| kernel, |h| &rewards[h]);
    let w_span = b.values.iter().map(|v| span_unchecked(v)).fold(0.0, f64::max);
    Ok(PlanArtifact {
        time,
        horizon,
        kernel: kernel.clone(),
        rewards,
        w: b.values,
        z: b.q,
        actions: b.greedy,
        w_span,
    })
}

/// `π^plan_{t,0}`, the policy executed until the next update.
pub fn first_policy(artifact: &PlanArtifact) -> MarkovPolicy {
    artifact.policy(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::solve_oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_kernel(rng: &mut ChaCha8Rng, n: usize, m: usize) -> ControlledKernel {
        let mut probs = Vec::new();
        for _ in 0..n * m {
            let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.01).collect();
            let z: f64 = w.iter().sum();
            probs.extend(w.iter().map(|x| x / z));
        }
        ControlledKernel::new(n, m, probs).unwrap()
    }

    fn random_rewards(rng: &mut ChaCha8Rng, n: usize, m: usize, h: usize) -> Vec<RewardTable> {
        (0..h).map(|_| RewardTable::from_fn(n, m, |_, _| rng.gen::<f64>())).collect()
    }

    #[test]
    fn horizon_rules() {
        assert_eq!(planning_horizon(HorizonRule::ToEnd, 5, 3, 0), 3);
        assert_eq!(planning_horizon(HorizonRule::ToEnd, 5, 3, 2), 1);
        assert_eq!(planning_horizon(HorizonRule::ToEnd, 2, 10, 0), 2);
        assert_eq!(planning_horizon(HorizonRule::BeforeEnd, 5, 3, 0), 2);
        assert_eq!(planning_horizon(HorizonRule::BeforeEnd, 5, 3, 2), 1);
    }

    #[test]
    fn bonus_shifts_rewards() {
        let k = ControlledKernel::uniform(2, 2);
        let mdp = TvMdp::with_tight_drift(vec![k; 3], vec![RewardTable::from_fn(2, 2, |s, a| (s + a) as f64); 3]).unwrap();
        let half = UncertaintyIntervals::from_bounds(0, 2, 2, vec![0.0; 8], vec![0.5; 8]).unwrap();
        let fc = vec![half; 3];
        let plain = build_augmented_rewards(&mdp, &fc, 0, 3, 0.0).unwrap();
        assert_eq!(plain[1], *mdp.reward(1));
        let shifted = build_augmented_rewards(&mdp, &fc, 0, 3, 2.0).unwrap();
        for s in 0..2 {
            for a in 0..2 {
                assert_eq!(shifted[2].get(s, a), mdp.reward(2).get(s, a) + 1.0);
            }
        }
        assert!(build_augmented_rewards(&mdp, &fc[..2], 0, 3, 1.0).is_err());
        assert!(build_augmented_rewards(&mdp, &fc, 1, 3, 1.0).is_err());
    }

    #[test]
    fn one_step_plan_and_zero_rewards() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = random_kernel(&mut rng, 3, 2);
        let r = random_rewards(&mut rng, 3, 2, 1);
        let p = plan(0, &k, r.clone()).unwrap();
        for s in 0..3 {
            assert_eq!(p.w[0][s], r[0].row(s).iter().copied().fold(f64::MIN, f64::max));
        }
        let zero = plan(0, &k, vec![RewardTable::zeros(3, 2); 4]).unwrap();
        assert!(zero.w.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(first_policy(&zero), MarkovPolicy::constant(3, 2, 0));
        assert!(plan(0, &k, Vec::new()).is_err());
    }

    #[test]
    fn frozen_true_kernel_matches_oracle_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = random_kernel(&mut rng, 3, 2);
        let rewards = random_rewards(&mut rng, 3, 2, 6);
        let mdp = TvMdp::with_tight_drift(vec![k.clone(); 6], rewards.clone()).unwrap();
        let oracle = solve_oracle(&mdp).unwrap();
        for t in 0..6 {
            let p = plan(t, &k, rewards[t..].to_vec()).unwrap();
            for s in 0..3 {
                assert!((p.w[0][s] - oracle.value(t)[s]).abs() < 1e-9);
            }
            assert_eq!(p.actions[0], (0..3).map(|s| oracle.greedy_action(t, s)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn first_policy_matches_oracle_on_two_step_example() {
        let p0 = ControlledKernel::from_fn(2, 2, |_, a, n| if n == a { 1.0 } else { 0.0 });
        let r = vec![RewardTable::from_fn(2, 2, |_, a| a as f64), RewardTable::from_fn(2, 2, |s, _| s as f64)];
        let art = plan(0, &p0, r.clone()).unwrap();
        assert_eq!(first_policy(&art), MarkovPolicy::constant(2, 2, 1));
        assert_eq!(first_policy(&plan(0, &p0, r).unwrap()), first_policy(&art));
    }

    /// Every deterministic `H`-step plan under the frozen kernel.
    fn brute_force(k: &ControlledKernel, rewards: &[RewardTable]) -> Vec<f64> {
        let (n, m) = (k.n_states(), k.n_actions());
        let per = m.pow(n as u32);
        let total = per.pow(rewards.len() as u32);
        let mut best = vec![f64::NEG_INFINITY; n];
        for code in 0..total {
            let mut c = code;
            let mut acts = Vec::new();
            for _ in 0..rewards.len() {
                let mut d = c % per;
                c /= per;
                acts.push((0..n).map(|_| { let a = d % m; d /= m; a }).collect::<Vec<_>>());
            }
            let mut v = vec![0.0; n];
            for h in (0..rewards.len()).rev() {
                v = (0..n).map(|s| { let a = acts[h][s]; rewards[h].get(s, a) + k.expect(s, a, &v) }).collect();
            }
            for s in 0..n {
                best[s] = best[s].max(v[s]);
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn plan_is_optimal_and_consistent(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=2, h in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_kernel(&mut rng, n, m);
            let r = random_rewards(&mut rng, n, m, h);
            let p = plan(0, &k, r.clone()).unwrap();
            let brute = brute_force(&k, &r);
            for s in 0..n {
                prop_assert!((p.w[0][s] - brute[s]).abs() < 1e-9);
            }
            for hh in 0..h {
                for s in 0..n {
                    for a in 0..m {
                        let z = r[hh].get(s, a) + k.expect(s, a, &p.w[hh + 1]);
                        prop_assert!((p.z[hh][s * m + a] - z).abs() <= 1e-12);
                    }
                    prop_assert_eq!(p.w[hh][s], p.z_row(hh, s).iter().copied().fold(f64::MIN, f64::max));
                }
            }
        }

        #[test]
        fn larger_bonus_never_lowers_values(seed in any::<u64>(), b1 in 0.0f64..2.0, db in 0.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = random_kernel(&mut rng, 3, 2);
            let mdp = TvMdp::with_tight_drift(vec![k.clone(); 4], random_rewards(&mut rng, 3, 2, 4)).unwrap();
            let lo: Vec<f64> = (0..18).map(|_| rng.gen::<f64>() * 0.5).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen::<f64>() * 0.5).collect();
            let fc = vec![UncertaintyIntervals::from_bounds(0, 3, 2, lo, hi).unwrap(); 4];
            let p1 = plan(0, &k, build_augmented_rewards(&mdp, &fc, 0, 4, b1).unwrap()).unwrap();
            let p2 = plan(0, &k, build_augmented_rewards(&mdp, &fc, 0, 4, b1 + db).unwrap()).unwrap();
            for (a, b) in p1.w.iter().flatten().zip(p2.w.iter().flatten()) {
                prop_assert!(*b >= *a - 1e-12);
            }
        }
    }
}
