use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Controlled transition table `P(s' | s, a)`, stored row-major by `(s, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlledKernel {
    n_states: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

impl ControlledKernel {
    pub fn new(n_states: usize, n_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if n_states == 0 || n_actions == 0 {
            return Err(Error::invalid("kernel needs at least one state and action"));
        }
        if probs.len() != n_states * n_actions * n_states {
            return Err(Error::invalid(format!(
                "kernel table has {} entries, expected {}",
                probs.len(),
                n_states * n_actions * n_states
            )));
        }
        Ok(Self {
            n_states,
            n_actions,
            probs,
        })
    }

    pub fn from_fn(
        n_states: usize,
        n_actions: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut probs = Vec::with_capacity(n_states * n_actions * n_states);
        for s in 0..n_states {
            for a in 0..n_actions {
                for next in 0..n_states {
                    probs.push(f(s, a, next));
                }
            }
        }
        Self {
            n_states,
            n_actions,
            probs,
        }
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        let p = 1.0 / n_states as f64;
        Self::from_fn(n_states, n_actions, |_, _, _| p)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.probs[start..start + self.n_states]
    }

    pub fn row_mut(&mut self, s: usize, a: usize) -> &mut [f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &mut self.probs[start..start + self.n_states]
    }

    pub fn prob(&self, s: usize, a: usize, next: usize) -> f64 {
        self.probs[(s * self.n_actions + a) * self.n_states + next]
    }

    /// `(P f)(s, a)`.
    pub fn expect(&self, s: usize, a: usize, f: &[f64]) -> f64 {
        self.row(s, a).iter().zip(f).map(|(p, v)| p * v).sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub(crate) fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.n_states)
            .map(|s| (0..self.n_actions).map(|a| self.row(s, a).to_vec()).collect())
            .collect()
    }
}

/// Reward table `r(s, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardTable {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl RewardTable {
    pub fn new(n_states: usize, n_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_states * n_actions {
            return Err(Error::invalid(format!(
                "reward table has {} entries, expected {}",
                values.len(),
                n_states * n_actions
            )));
        }
        Ok(Self {
            n_states,
            n_actions,
            values,
        })
    }

    pub fn from_fn(n_states: usize, n_actions: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n_states * n_actions);
        for s in 0..n_states {
            for a in 0..n_actions {
                values.push(f(s, a));
            }
        }
        Self {
            n_states,
            n_actions,
            values,
        }
    }

    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        Self::from_fn(n_states, n_actions, |_, _| 0.0)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n_actions + a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    #[cfg(test)]
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.n_states).map(|s| self.row(s).to_vec()).collect()
    }
}

/// Uncontrolled kernel `P(s' | s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateKernel {
    n_states: usize,
    probs: Vec<f64>,
}

impl StateKernel {
    pub fn new(n_states: usize, probs: Vec<f64>) -> Result<Self> {
        if n_states == 0 || probs.len() != n_states * n_states {
            return Err(Error::invalid(format!(
                "state kernel over {n_states} states needs {} entries, got {}",
                n_states * n_states,
                probs.len()
            )));
        }
        Ok(Self { n_states, probs })
    }

    pub fn identity(n_states: usize) -> Self {
        let mut probs = vec![0.0; n_states * n_states];
        for s in 0..n_states {
            probs[s * n_states + s] = 1.0;
        }
        Self { n_states, probs }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s * self.n_states..(s + 1) * self.n_states]
    }

    pub fn prob(&self, s: usize, next: usize) -> f64 {
        self.probs[s * self.n_states + next]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &StateKernel) -> Result<StateKernel> {
        if self.n_states != next.n_states {
            return Err(Error::invalid("composing kernels over different state spaces"));
        }
        let n = self.n_states;
        let mut probs = vec![0.0; n * n];
        for s in 0..n {
            for mid in 0..n {
                let p = self.probs[s * n + mid];
                if p == 0.0 {
                    continue;
                }
                for target in 0..n {
                    probs[s * n + target] += p * next.probs[mid * n + target];
                }
            }
        }
        Ok(StateKernel { n_states: n, probs })
    }
}

/// Time-ordered product `P_t P_{t+1} ⋯ P_{t+m-1}`.
pub fn compose_kernels(kernels: &[StateKernel]) -> Result<StateKernel> {
    let (first, rest) = kernels
        .split_first()
        .ok_or_else(|| Error::invalid("compose_kernels needs at least one kernel"))?;
    rest.iter().try_fold(first.clone(), |acc, k| acc.then(k))
}
