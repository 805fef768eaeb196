//! Constrained maximum-likelihood estimation of drift-coupled kernels, the
//! coordinate ranges of the solution polytope, and their forward forecasts.
//!
//! Both the likelihood problem and the range LPs split by `(s, a)` pair. For a
//! pair, only the update times at which it was played carry information; the
//! kernels in between can always be filled in by interpolating along the
//! cumulative drift budget, so each pair reduces to a short chain of
//! distributions linked by box constraints.

mod cmle;
pub mod lp;
mod polytope;
mod forecast;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ControlledKernel;

pub use cmle::{solve_cmle, CmleInit, CmleOptions};
pub use forecast::forecast_uncertainty;
pub use polytope::{
    polytope_coordinate_range, uncertainty_diameter, uncertainty_intervals, uncertainty_intervals_at,
    UncertaintyIntervals,
};

/// Budgets at or below this are treated as equality links.
pub(crate) const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub time: usize,
    pub state: usize,
    pub action: usize,
    pub next: usize,
}

/// Triples `(τ_k, s_{τ_k}, a_{τ_k}, s_{τ_k + 1})`, one per update time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDataset {
    n_states: usize,
    n_actions: usize,
    triples: Vec<Transition>,
}

impl TransitionDataset {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        Self {
            n_states,
            n_actions,
            triples: Vec::new(),
        }
    }

    pub fn from_triples(n_states: usize, n_actions: usize, triples: Vec<Transition>) -> Result<Self> {
        let mut d = Self::new(n_states, n_actions);
        for t in triples {
            d.push(t)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, tr: Transition) -> Result<()> {
        if tr.state >= self.n_states || tr.next >= self.n_states || tr.action >= self.n_actions {
            return Err(Error::invalid(format!("transition {tr:?} out of range")));
        }
        if let Some(last) = self.triples.last() {
            if tr.time <= last.time {
                return Err(Error::invalid(format!(
                    "transition times must increase: {} after {}",
                    tr.time, last.time
                )));
            }
        }
        self.triples.push(tr);
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn triples(&self) -> &[Transition] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn times(&self) -> Vec<usize> {
        self.triples.iter().map(|t| t.time).collect()
    }

    pub fn latest_time(&self) -> Option<usize> {
        self.triples.last().map(|t| t.time)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    /// Newton steps summed over all pairs.
    pub iterations: usize,
    /// Largest certified duality gap over pairs.
    pub duality_gap: f64,
    /// Largest scaled Newton decrement at the last centering step.
    pub kkt_residual: f64,
}

/// Estimated kernels `P̂_{τ_k}` for every update time in the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEstimate {
    pub times: Vec<usize>,
    pub kernels: Vec<ControlledKernel>,
    pub diagnostics: SolverDiagnostics,
}

impl ChainEstimate {
    pub fn latest(&self) -> &ControlledKernel {
        self.kernels.last().expect("estimate covers at least one update")
    }

    /// `Σ_k log P̂_{τ_k}(s_{τ_k+1} | s_{τ_k}, a_{τ_k})`.
    pub fn log_likelihood(&self, data: &TransitionDataset) -> f64 {
        data.triples()
            .iter()
            .zip(&self.kernels)
            .map(|(tr, k)| k.prob(tr.state, tr.action, tr.next).ln())
            .sum()
    }

    /// Largest violation of the simplex and drift-chain constraints.
    pub fn max_violation(&self, drift: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for k in &self.kernels {
            let (n, m) = (k.n_states(), k.n_actions());
            for s in 0..n {
                for a in 0..m {
                    let row = k.row(s, a);
                    worst = worst.max((row.iter().sum::<f64>() - 1.0).abs());
                    worst = worst.max(row.iter().map(|&p| -p).fold(0.0, f64::max));
                }
            }
        }
        for w in 1..self.kernels.len() {
            let budget: f64 = drift[self.times[w - 1]..self.times[w]].iter().sum();
            for (x, y) in self.kernels[w - 1].as_slice().iter().zip(self.kernels[w].as_slice()) {
                worst = worst.max((x - y).abs() - budget);
            }
        }
        worst
    }
}

/// Occurrences of one `(s, a)` pair grouped into nodes linked by positive budgets.
#[derive(Debug, Clone)]
pub(crate) struct PairChain {
    pub occ_times: Vec<usize>,
    pub occ_group: Vec<usize>,
    /// Next-state counts per group.
    pub counts: Vec<Vec<f64>>,
    /// `budgets[g]` links group `g − 1` to `g`; `budgets[0]` is unused.
    pub budgets: Vec<f64>,
    /// Time of the last occurrence in each group.
    pub group_last_time: Vec<usize>,
}

impl PairChain {
    pub fn groups(&self) -> usize {
        self.counts.len()
    }

    pub fn observed(&self, g: usize, y: usize) -> bool {
        self.counts[g][y] > 0.0
    }
}

pub(crate) fn pair_chain(data: &TransitionDataset, drift: &[f64], s: usize, a: usize) -> Option<PairChain> {
    let n = data.n_states();
    let mut chain = PairChain {
        occ_times: Vec::new(),
        occ_group: Vec::new(),
        counts: Vec::new(),
        budgets: Vec::new(),
        group_last_time: Vec::new(),
    };
    for tr in data.triples().iter().filter(|tr| tr.state == s && tr.action == a) {
        let link = chain
            .occ_times
            .last()
            .map(|&prev| drift[prev..tr.time].iter().sum::<f64>());
        match link {
            Some(b) if b <= MERGE_TOL => {}
            _ => {
                chain.counts.push(vec![0.0; n]);
                chain.budgets.push(link.unwrap_or(0.0));
                chain.group_last_time.push(tr.time);
            }
        }
        let g = chain.counts.len() - 1;
        chain.counts[g][tr.next] += 1.0;
        chain.group_last_time[g] = tr.time;
        chain.occ_times.push(tr.time);
        chain.occ_group.push(g);
    }
    (!chain.occ_times.is_empty()).then_some(chain)
}

pub(crate) fn check_drift(data: &TransitionDataset, drift: &[f64]) -> Result<()> {
    if drift.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
        return Err(Error::invalid("drift bounds must be finite and nonnegative"));
    }
    if let Some(t) = data.latest_time() {
        if t >= drift.len() {
            return Err(Error::invalid(format!(
                "transition at t = {t} lies beyond the drift schedule of length {}",
                drift.len()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_rejects_bad_triples() {
        let mut d = TransitionDataset::new(2, 2);
        d.push(Transition { time: 0, state: 0, action: 1, next: 1 }).unwrap();
        assert!(d.push(Transition { time: 0, state: 0, action: 0, next: 0 }).is_err());
        assert!(d.push(Transition { time: 2, state: 2, action: 0, next: 0 }).is_err());
        assert!(d.push(Transition { time: 2, state: 0, action: 2, next: 0 }).is_err());
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn chain_groups_merge_on_zero_budget() {
        let triples = vec![
            Transition { time: 0, state: 0, action: 0, next: 0 },
            Transition { time: 1, state: 1, action: 0, next: 0 },
            Transition { time: 2, state: 0, action: 0, next: 1 },
            Transition { time: 3, state: 0, action: 0, next: 1 },
        ];
        let d = TransitionDataset::from_triples(2, 1, triples).unwrap();
        let drift = [0.1, 0.1, 0.0, 0.0];
        let c = pair_chain(&d, &drift, 0, 0).unwrap();
        assert_eq!(c.occ_times, vec![0, 2, 3]);
        assert_eq!(c.occ_group, vec![0, 1, 1]);
        assert_eq!(c.counts, vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert!((c.budgets[1] - 0.2).abs() < 1e-15);
        assert_eq!(c.group_last_time, vec![0, 3]);
        assert_eq!(pair_chain(&d, &drift, 1, 0).unwrap().groups(), 1);
    }
}
