use serde::{Deserialize, Serialize};

use super::{ControlledKernel, StateKernel, ROW_SUM_TOL};
use crate::error::{Error, Result};

/// One-step Markov policy `π(a | s)`. Deterministic policies are one-hot rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovPolicy {
    n_states: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

impl MarkovPolicy {
    pub fn new(n_states: usize, n_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != n_states * n_actions {
            return Err(Error::invalid(format!(
                "policy table has {} entries, expected {}",
                probs.len(),
                n_states * n_actions
            )));
        }
        for s in 0..n_states {
            let row = &probs[s * n_actions..(s + 1) * n_actions];
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::invalid(format!("policy row {s} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::invalid(format!("policy row {s} sums to {sum}")));
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            probs,
        })
    }

    pub fn deterministic(actions: &[usize], n_actions: usize) -> Result<Self> {
        let mut probs = vec![0.0; actions.len() * n_actions];
        for (s, &a) in actions.iter().enumerate() {
            if a >= n_actions {
                return Err(Error::invalid(format!("action {a} out of range at state {s}")));
            }
            probs[s * n_actions + a] = 1.0;
        }
        Ok(Self {
            n_states: actions.len(),
            n_actions,
            probs,
        })
    }

    pub fn constant(n_states: usize, n_actions: usize, action: usize) -> Self {
        Self::deterministic(&vec![action; n_states], n_actions).expect("action in range")
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn action_probs(&self, s: usize) -> &[f64] {
        &self.probs[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.n_actions + a]
    }

    /// Most likely action at `s`, lowest index on ties.
    pub fn mode(&self, s: usize) -> usize {
        let row = self.action_probs(s);
        let mut best = 0;
        for a in 1..row.len() {
            if row[a] > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn is_deterministic(&self) -> bool {
        self.probs.iter().all(|&p| p == 0.0 || p == 1.0)
    }
}

/// Policy-induced kernel `P^π(s' | s) = Σ_a π(a | s) P(s' | s, a)`.
pub fn apply_policy_kernel(kernel: &ControlledKernel, policy: &MarkovPolicy) -> Result<StateKernel> {
    if kernel.n_states() != policy.n_states() || kernel.n_actions() != policy.n_actions() {
        return Err(Error::invalid("policy and kernel dimensions disagree"));
    }
    let n = kernel.n_states();
    let mut probs = vec![0.0; n * n];
    for s in 0..n {
        for a in 0..kernel.n_actions() {
            let w = policy.prob(s, a);
            if w == 0.0 {
                continue;
            }
            for (next, p) in kernel.row(s, a).iter().enumerate() {
                probs[s * n + next] += w * p;
            }
        }
    }
    StateKernel::new(n, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_kernel(rng: &mut ChaCha8Rng, n: usize, m: usize) -> ControlledKernel {
        let mut k = ControlledKernel::from_fn(n, m, |_, _, _| rng.gen::<f64>() + 0.05);
        for s in 0..n {
            for a in 0..m {
                let row = k.row_mut(s, a);
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|p| *p /= total);
            }
        }
        k
    }

    #[test]
    fn one_hot_policy_selects_action_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = random_kernel(&mut rng, 3, 2);
        let pi = MarkovPolicy::constant(3, 2, 0);
        let induced = apply_policy_kernel(&k, &pi).unwrap();
        for s in 0..3 {
            assert_eq!(induced.row(s), k.row(s, 0));
        }
    }

    #[test]
    fn uniform_policy_averages_slices() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = random_kernel(&mut rng, 3, 2);
        let pi = MarkovPolicy::new(3, 2, vec![0.5; 6]).unwrap();
        let induced = apply_policy_kernel(&k, &pi).unwrap();
        for s in 0..3 {
            for next in 0..3 {
                let avg = 0.5 * (k.prob(s, 0, next) + k.prob(s, 1, next));
                assert!((induced.prob(s, next) - avg).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn induced_rows_are_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let k = random_kernel(&mut rng, 4, 3);
            let mut probs = Vec::new();
            for _ in 0..4 {
                let w: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
                let t: f64 = w.iter().sum();
                probs.extend(w.iter().map(|x| x / t));
            }
            // renormalisation above can leave ~1 ulp error; rebuild last entry.
            for s in 0..4 {
                let head: f64 = probs[s * 3..s * 3 + 2].iter().sum();
                probs[s * 3 + 2] = 1.0 - head;
            }
            let pi = MarkovPolicy::new(4, 3, probs).unwrap();
            let induced = apply_policy_kernel(&k, &pi).unwrap();
            for s in 0..4 {
                let sum: f64 = induced.row(s).iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(MarkovPolicy::new(1, 2, vec![0.6, 0.6]).is_err());
        assert!(MarkovPolicy::deterministic(&[2], 2).is_err());
        let k = ControlledKernel::uniform(2, 2);
        let pi = MarkovPolicy::constant(3, 2, 0);
        assert!(apply_policy_kernel(&k, &pi).is_err());
    }
}
