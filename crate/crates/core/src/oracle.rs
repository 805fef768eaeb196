//! Full-information benchmark: optimal values by backward induction, exact
//! policy evaluation, and the overlap coefficient behind the mixing assumption.

use serde::{Deserialize, Serialize};

use crate::dp;
use crate::error::{Error, Result};
use crate::model::{apply_policy_kernel, compose_kernels, span_unchecked, MarkovPolicy, StateKernel, TvMdp};

/// Optimal values `V*_t` (with `V*_T ≡ 0`), `Q*_t` and the greedy policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTables {
    n_states: usize,
    n_actions: usize,
    values: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
    greedy: Vec<Vec<usize>>,
}

impl ValueTables {
    pub fn horizon(&self) -> usize {
        self.q.len()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// `V*_t` for `t ∈ [0, T]`.
    pub fn value(&self, t: usize) -> &[f64] {
        &self.values[t]
    }

    pub fn q(&self, t: usize, s: usize, a: usize) -> f64 {
        self.q[t][s * self.n_actions + a]
    }

    pub fn q_row(&self, t: usize, s: usize) -> &[f64] {
        &self.q[t][s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn greedy_action(&self, t: usize, s: usize) -> usize {
        self.greedy[t][s]
    }

    pub fn greedy_policy(&self, t: usize) -> MarkovPolicy {
        MarkovPolicy::deterministic(&self.greedy[t], self.n_actions).expect("greedy actions in range")
    }

    pub fn greedy_policies(&self) -> Vec<MarkovPolicy> {
        (0..self.horizon()).map(|t| self.greedy_policy(t)).collect()
    }

    /// `J*_T(s) = V*_0(s)`.
    pub fn optimal_return(&self) -> &[f64] {
        &self.values[0]
    }
}

pub fn solve_oracle(mdp: &TvMdp) -> Result<ValueTables> {
    mdp.ensure_valid()?;
    let b = dp::backward(
        mdp.n_states(),
        mdp.n_actions(),
        mdp.horizon(),
        |t| mdp.kernel(t),
        |t| mdp.reward(t),
    );
    Ok(ValueTables {
        n_states: mdp.n_states(),
        n_actions: mdp.n_actions(),
        values: b.values,
        q: b.q,
        greedy: b.greedy,
    })
}

/// `Ṽ = max_k sp(V*_k)`.
pub fn span_bounds(tables: &ValueTables) -> f64 {
    tables.values.iter().map(|v| span_unchecked(v)).fold(0.0, f64::max)
}

/// Exact values `V^π_t` of a Markov policy sequence, `t ∈ [0, T]`.
pub fn evaluate_policies(mdp: &TvMdp, policies: &[MarkovPolicy]) -> Result<Vec<Vec<f64>>> {
    check_policies(mdp, policies)?;
    let n = mdp.n_states();
    let mut values = vec![vec![0.0; n]; mdp.horizon() + 1];
    for t in (0..mdp.horizon()).rev() {
        let (head, tail) = values.split_at_mut(t + 1);
        let next = &tail[0];
        for s in 0..n {
            head[t][s] = (0..mdp.n_actions())
                .map(|a| {
                    policies[t].prob(s, a) * (mdp.reward(t).get(s, a) + mdp.kernel(t).expect(s, a, next))
                })
                .sum();
        }
    }
    Ok(values)
}

fn check_policies(mdp: &TvMdp, policies: &[MarkovPolicy]) -> Result<()> {
    if policies.len() < mdp.horizon() {
        return Err(Error::invalid(format!(
            "policy sequence has {} entries, horizon is {}",
            policies.len(),
            mdp.horizon()
        )));
    }
    if policies
        .iter()
        .any(|p| p.n_states() != mdp.n_states() || p.n_actions() != mdp.n_actions())
    {
        return Err(Error::invalid("policy dimensions disagree with the instance"));
    }
    Ok(())
}

fn window_kernel(mdp: &TvMdp, policies: &[MarkovPolicy], t: usize, m: usize) -> Result<StateKernel> {
    let steps = (t..t + m)
        .map(|k| apply_policy_kernel(mdp.kernel(k), &policies[k]))
        .collect::<Result<Vec<_>>>()?;
    compose_kernels(&steps)
}

/// Minimal shared mass of two m-step state kernels over all start pairs.
pub fn kernel_overlap(p1: &StateKernel, p2: &StateKernel) -> f64 {
    let n = p1.n_states();
    let mut eta = f64::INFINITY;
    for s1 in 0..n {
        for s2 in 0..n {
            let shared: f64 = p1.row(s1).iter().zip(p2.row(s2)).map(|(a, b)| a.min(*b)).sum();
            eta = eta.min(shared);
        }
    }
    eta.clamp(0.0, 1.0)
}

/// `η_t(π¹, π²)` over the window `[t, t + m)`. Policies are indexed by absolute time.
pub fn overlap_coefficient(
    mdp: &TvMdp,
    pi1: &[MarkovPolicy],
    pi2: &[MarkovPolicy],
    t: usize,
    m: usize,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("block length m must be at least 1"));
    }
    if t + m > mdp.horizon() {
        return Err(Error::invalid(format!(
            "window [{t}, {}) exceeds horizon {}",
            t + m,
            mdp.horizon()
        )));
    }
    check_policies(mdp, pi1)?;
    check_policies(mdp, pi2)?;
    Ok(kernel_overlap(
        &window_kernel(mdp, pi1, t, m)?,
        &window_kernel(mdp, pi2, t, m)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCertificate {
    pub m: usize,
    /// `η_t` for `t ∈ [0, T − m]`.
    pub eta_per_t: Vec<f64>,
    pub eta: f64,
    pub alpha: f64,
}

impl MixingCertificate {
    pub fn holds(&self) -> bool {
        self.eta > 0.0
    }

    pub fn require(&self) -> Result<()> {
        if self.holds() {
            Ok(())
        } else {
            let t = self.eta_per_t.iter().position(|&e| e <= 0.0).unwrap_or(0);
            Err(Error::AssumptionViolated(format!(
                "overlap coefficient is 0 at t = {t} (m = {})",
                self.m
            )))
        }
    }
}

pub fn certify_mixing(
    mdp: &TvMdp,
    pi_alg: &[MarkovPolicy],
    pi_star: &[MarkovPolicy],
    m: usize,
) -> Result<MixingCertificate> {
    if m == 0 || m > mdp.horizon() {
        return Err(Error::invalid(format!(
            "block length {m} must lie in [1, {}]",
            mdp.horizon()
        )));
    }
    let eta_per_t = (0..=mdp.horizon() - m)
        .map(|t| overlap_coefficient(mdp, pi_alg, pi_star, t, m))
        .collect::<Result<Vec<_>>>()?;
    let eta = eta_per_t.iter().copied().fold(1.0, f64::min);
    Ok(MixingCertificate {
        m,
        eta_per_t,
        eta,
        alpha: 1.0 - eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tv_distance, ControlledKernel, RewardTable};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.05).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    fn random_mdp(seed: u64, n: usize, m: usize, horizon: usize) -> TvMdp {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kernels = (0..horizon)
            .map(|_| {
                let mut probs = Vec::new();
                for _ in 0..n * m {
                    probs.extend(random_row(&mut rng, n));
                }
                ControlledKernel::new(n, m, probs).unwrap()
            })
            .collect();
        let rewards = (0..horizon)
            .map(|_| RewardTable::from_fn(n, m, |_, _| rng.gen::<f64>()))
            .collect();
        TvMdp::with_tight_drift(kernels, rewards).unwrap()
    }

    fn example_t2() -> TvMdp {
        let p0 = ControlledKernel::from_fn(2, 2, |_, a, n| if n == a { 1.0 } else { 0.0 });
        let p1 = ControlledKernel::uniform(2, 2);
        let r0 = RewardTable::from_fn(2, 2, |_, a| a as f64);
        let r1 = RewardTable::from_fn(2, 2, |s, _| s as f64);
        TvMdp::with_tight_drift(vec![p0, p1], vec![r0, r1]).unwrap()
    }

    /// All deterministic Markov policy sequences, evaluated exactly.
    fn brute_force_best(mdp: &TvMdp) -> Vec<f64> {
        let (n, m, horizon) = (mdp.n_states(), mdp.n_actions(), mdp.horizon());
        let per_step = m.pow(n as u32);
        let total = per_step.pow(horizon as u32);
        let mut best = vec![f64::NEG_INFINITY; n];
        for code in 0..total {
            let mut c = code;
            let policies: Vec<MarkovPolicy> = (0..horizon)
                .map(|_| {
                    let mut d = c % per_step;
                    c /= per_step;
                    let actions: Vec<usize> = (0..n)
                        .map(|_| {
                            let a = d % m;
                            d /= m;
                            a
                        })
                        .collect();
                    MarkovPolicy::deterministic(&actions, m).unwrap()
                })
                .collect();
            let v = evaluate_policies(mdp, &policies).unwrap();
            for s in 0..n {
                best[s] = best[s].max(v[0][s]);
            }
        }
        best
    }

    #[test]
    fn one_step_horizon_is_max_reward() {
        let mdp = random_mdp(3, 3, 2, 1);
        let tables = solve_oracle(&mdp).unwrap();
        for s in 0..3 {
            let expected = mdp.reward(0).row(s).iter().copied().fold(f64::MIN, f64::max);
            assert_eq!(tables.value(0)[s], expected);
        }
    }

    #[test]
    fn two_step_example() {
        let tables = solve_oracle(&example_t2()).unwrap();
        assert_eq!(tables.value(0), &[2.0, 2.0]);
        assert_eq!(tables.q_row(0, 0), &[0.0, 2.0]);
        assert_eq!(tables.q_row(0, 1), &[0.0, 2.0]);
        assert_eq!(tables.value(1), &[0.0, 1.0]);
        assert_eq!(span_bounds(&tables), 1.0);
        assert_eq!(brute_force_best(&example_t2()), vec![2.0, 2.0]);
    }

    #[test]
    fn zero_rewards_give_zero_values() {
        let mut mdp = random_mdp(4, 2, 2, 3);
        let rewards = vec![RewardTable::zeros(2, 2); 3];
        mdp = TvMdp::new(mdp.kernels().to_vec(), rewards, mdp.drift().to_vec()).unwrap();
        let tables = solve_oracle(&mdp).unwrap();
        for t in 0..=3 {
            assert!(tables.value(t).iter().all(|&v| v == 0.0));
        }
        assert_eq!(span_bounds(&tables), 0.0);
        assert!((0..3).all(|t| tables.greedy[t].iter().all(|&a| a == 0)));
    }

    #[test]
    fn invalid_instance_is_refused() {
        let k = ControlledKernel::from_fn(2, 1, |_, _, _| 0.4);
        let m = TvMdp::new(vec![k], vec![RewardTable::zeros(2, 1)], vec![0.0]).unwrap();
        assert!(matches!(solve_oracle(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn overlap_extremes() {
        let uniform = TvMdp::with_tight_drift(
            vec![ControlledKernel::uniform(3, 2); 2],
            vec![RewardTable::zeros(3, 2); 2],
        )
        .unwrap();
        let pi = vec![MarkovPolicy::constant(3, 2, 0); 2];
        let pi2 = vec![MarkovPolicy::constant(3, 2, 1); 2];
        assert!((overlap_coefficient(&uniform, &pi, &pi2, 0, 1).unwrap() - 1.0).abs() < 1e-12);
        let cert = certify_mixing(&uniform, &pi, &pi2, 2).unwrap();
        assert!((cert.eta - 1.0).abs() < 1e-12 && cert.alpha.abs() < 1e-12);

        let split = TvMdp::with_tight_drift(
            vec![ControlledKernel::from_fn(2, 2, |_, a, n| if n == a { 1.0 } else { 0.0 })],
            vec![RewardTable::zeros(2, 2)],
        )
        .unwrap();
        let a0 = vec![MarkovPolicy::constant(2, 2, 0)];
        let a1 = vec![MarkovPolicy::constant(2, 2, 1)];
        assert_eq!(overlap_coefficient(&split, &a0, &a1, 0, 1).unwrap(), 0.0);
        let cert = certify_mixing(&split, &a0, &a1, 1).unwrap();
        assert!(!cert.holds());
        assert!(matches!(cert.require(), Err(Error::AssumptionViolated(_))));
        assert!(overlap_coefficient(&split, &a0, &a1, 0, 2).is_err());
        assert!(certify_mixing(&split, &a0, &a1, 2).is_err());
    }

    #[test]
    fn certificate_is_min_of_window_values() {
        let mdp = random_mdp(11, 2, 2, 6);
        let tables = solve_oracle(&mdp).unwrap();
        let star = tables.greedy_policies();
        let other = vec![MarkovPolicy::constant(2, 2, 1); 6];
        let cert = certify_mixing(&mdp, &other, &star, 2).unwrap();
        assert_eq!(cert.eta_per_t.len(), 5);
        let brute = (0..5)
            .map(|t| overlap_coefficient(&mdp, &other, &star, t, 2).unwrap())
            .fold(1.0, f64::min);
        assert_eq!(cert.eta, brute);
        assert!((0.0..=1.0).contains(&cert.eta) && (0.0..=1.0).contains(&cert.alpha));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn backward_induction_beats_every_deterministic_sequence(
            seed in any::<u64>(), n in 1usize..=3, m in 1usize..=2, horizon in 1usize..=3
        ) {
            let mdp = random_mdp(seed, n, m, horizon);
            let tables = solve_oracle(&mdp).unwrap();
            let brute = brute_force_best(&mdp);
            for s in 0..n {
                prop_assert!((tables.value(0)[s] - brute[s]).abs() < 1e-9);
            }
        }

        #[test]
        fn raising_a_reward_never_lowers_earlier_values(
            seed in any::<u64>(), t in 0usize..4, s in 0usize..3, a in 0usize..2, bump in 0.0f64..2.0
        ) {
            let mdp = random_mdp(seed, 3, 2, 4);
            let base = solve_oracle(&mdp).unwrap();
            let mut rewards = mdp.rewards().to_vec();
            rewards[t].values_mut()[s * 2 + a] += bump;
            let bumped = TvMdp::new(mdp.kernels().to_vec(), rewards, mdp.drift().to_vec()).unwrap();
            let high = solve_oracle(&bumped).unwrap();
            for k in 0..=t {
                for x in 0..3 {
                    prop_assert!(high.value(k)[x] >= base.value(k)[x] - 1e-12);
                }
            }
        }

        #[test]
        fn self_overlap_is_doeblin_and_overlap_is_symmetric(seed in any::<u64>()) {
            let mdp = random_mdp(seed, 3, 2, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
            let pol = |rng: &mut ChaCha8Rng| {
                let mut probs = Vec::new();
                for _ in 0..3 { probs.extend(random_row(rng, 2)); }
                MarkovPolicy::new(3, 2, probs).unwrap()
            };
            let p1 = vec![pol(&mut rng), pol(&mut rng)];
            let p2 = vec![pol(&mut rng), pol(&mut rng)];
            let k = apply_policy_kernel(mdp.kernel(0), &p1[0]).unwrap();
            let mut worst_tv = 0.0f64;
            for x in 0..3 {
                for y in 0..3 {
                    worst_tv = worst_tv.max(tv_distance(k.row(x), k.row(y)).unwrap());
                }
            }
            let eta = overlap_coefficient(&mdp, &p1, &p1, 0, 1).unwrap();
            prop_assert!((eta - (1.0 - worst_tv)).abs() < 1e-12);
            let ab = overlap_coefficient(&mdp, &p1, &p2, 0, 2).unwrap();
            let ba = overlap_coefficient(&mdp, &p2, &p1, 0, 2).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
        }
    }
}
