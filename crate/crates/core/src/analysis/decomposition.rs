use serde::{Deserialize, Serialize};

use crate::controller::{ExactEvaluation, ExecutedPolicies};
use crate::error::{Error, Result};
use crate::model::TvMdp;
use crate::oracle::ValueTables;

/// `Δ_t(s₀) = E[Q*_t(s_t, a*_t) − Q*_t(s_t, a^alg_t)]` along the algorithm's state law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretDecomposition {
    /// `delta[s₀][t]`.
    pub delta: Vec<Vec<f64>>,
    pub update_sum: Vec<f64>,
    pub skip_sum: Vec<f64>,
    /// `V*_0(s₀) − V^alg_0(s₀)`.
    pub value_gap: Vec<f64>,
}

impl RegretDecomposition {
    /// `Σ_t Δ_t(s₀) − (V*_0 − V^alg_0)(s₀)`, which telescopes to zero.
    pub fn telescoping_residual(&self) -> Vec<f64> {
        self.delta
            .iter()
            .zip(&self.value_gap)
            .map(|(d, g)| d.iter().sum::<f64>() - g)
            .collect()
    }
}

pub fn per_step_regret(
    mdp: &TvMdp,
    tables: &ValueTables,
    eval: &ExactEvaluation,
    executed: &ExecutedPolicies,
) -> Result<RegretDecomposition> {
    let (n, m, horizon) = (mdp.n_states(), mdp.n_actions(), mdp.horizon());
    if tables.horizon() != horizon || executed.horizon() != horizon || eval.values.len() != n {
        return Err(Error::invalid("oracle, evaluation and policies disagree on shape"));
    }
    let mut delta = vec![vec![0.0; horizon]; n];
    let mut update_sum = vec![0.0; n];
    let mut skip_sum = vec![0.0; n];
    for s0 in 0..n {
        for t in 0..horizon {
            let is_update = executed.schedule.is_update(t);
            let policy = &executed.policies[t];
            let joint = &eval.joints[s0][t];
            let v = tables.value(t);
            let mut d = 0.0;
            for s in 0..n {
                for stale in 0..n {
                    let w = joint.get(s, stale);
                    if w == 0.0 {
                        continue;
                    }
                    let input = if is_update { s } else { stale };
                    for a in 0..m {
                        d += w * policy.prob(input, a) * (v[s] - tables.q(t, s, a));
                    }
                }
            }
            delta[s0][t] = d;
            if is_update {
                update_sum[s0] += d;
            } else {
                skip_sum[s0] += d;
            }
        }
    }
    let value_gap = tables
        .optimal_return()
        .iter()
        .zip(&eval.values)
        .map(|(v, j)| v - j)
        .collect();
    Ok(RegretDecomposition {
        delta,
        update_sum,
        skip_sum,
        value_gap,
    })
}
