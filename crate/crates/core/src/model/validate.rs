use serde::{Deserialize, Serialize};

use super::{TvMdp, DRIFT_SLACK, ROW_SUM_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RowSum { t: usize, s: usize, a: usize, sum: f64 },
    ProbabilityRange { t: usize, s: usize, a: usize, next: usize, value: f64 },
    Drift {
        t: usize,
        s: usize,
        a: usize,
        next: usize,
        change: f64,
        bound: f64,
    },
    NegativeDrift { t: usize, value: f64 },
    NonFiniteReward { t: usize, s: usize, a: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated invariant: stochastic rows, the drift bound, finite rewards.
pub fn validate_instance(mdp: &TvMdp) -> ValidationReport {
    let mut violations = Vec::new();
    let (n, m) = (mdp.n_states(), mdp.n_actions());
    for t in 0..mdp.horizon() {
        let kernel = mdp.kernel(t);
        for s in 0..n {
            for a in 0..m {
                let row = kernel.row(s, a);
                for (next, &p) in row.iter().enumerate() {
                    if !(0.0..=1.0).contains(&p) {
                        violations.push(Violation::ProbabilityRange { t, s, a, next, value: p });
                    }
                }
                let sum: f64 = row.iter().sum();
                if !((sum - 1.0).abs() <= ROW_SUM_TOL) {
                    violations.push(Violation::RowSum { t, s, a, sum });
                }
                let r = mdp.reward(t).get(s, a);
                if !r.is_finite() {
                    violations.push(Violation::NonFiniteReward { t, s, a });
                }
            }
        }
        let eps = mdp.drift()[t];
        if !(eps >= 0.0) {
            violations.push(Violation::NegativeDrift { t, value: eps });
        }
    }
    for t in 0..mdp.horizon().saturating_sub(1) {
        let bound = mdp.drift()[t];
        let (cur, next_k) = (mdp.kernel(t), mdp.kernel(t + 1));
        for s in 0..n {
            for a in 0..m {
                for next in 0..n {
                    let change = (next_k.prob(s, a, next) - cur.prob(s, a, next)).abs();
                    if !(change <= bound + DRIFT_SLACK) {
                        violations.push(Violation::Drift { t, s, a, next, change, bound });
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ControlledKernel, RewardTable};

    fn two_state(horizon: usize) -> Vec<ControlledKernel> {
        (0..horizon)
            .map(|_| ControlledKernel::from_fn(2, 2, |s, _, n| if s == n { 0.8 } else { 0.2 }))
            .collect()
    }

    #[test]
    fn valid_instance_has_empty_report() {
        let m = TvMdp::with_tight_drift(two_state(4), vec![RewardTable::zeros(2, 2); 4]).unwrap();
        assert!(validate_instance(&m).is_valid());
    }

    #[test]
    fn short_row_is_reported_with_indices() {
        let mut kernels = two_state(3);
        kernels[1].row_mut(1, 0).copy_from_slice(&[0.1, 0.8]);
        let m = TvMdp::new(kernels, vec![RewardTable::zeros(2, 2); 3], vec![1.0; 3]).unwrap();
        let report = validate_instance(&m);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::RowSum { t: 1, s: 1, a: 0, .. })));
    }

    #[test]
    fn drift_violation_names_time_and_coordinate() {
        let mut kernels = two_state(6);
        for k in kernels.iter_mut().skip(4) {
            k.row_mut(0, 1).copy_from_slice(&[0.5, 0.5]);
        }
        // max change between t = 3 and t = 4 is |0.5 − 0.8| = 0.3 at (0, 1, ·).
        let drift = vec![0.1; 6];
        let m = TvMdp::new(kernels, vec![RewardTable::zeros(2, 2); 6], drift).unwrap();
        let report = validate_instance(&m);
        let drift_hits: Vec<_> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::Drift { t, s, a, next, change, .. } => Some((*t, *s, *a, *next, *change)),
                _ => None,
            })
            .collect();
        assert_eq!(drift_hits.len(), 2);
        for (t, s, a, _, change) in drift_hits {
            assert_eq!((t, s, a), (3, 0, 1));
            assert!((change - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_reward_is_reported() {
        let mut rewards = vec![RewardTable::zeros(2, 2); 2];
        rewards[1] = RewardTable::from_fn(2, 2, |s, a| if s == 1 && a == 1 { f64::INFINITY } else { 0.0 });
        let m = TvMdp::with_tight_drift(two_state(2), rewards).unwrap();
        assert_eq!(
            validate_instance(&m).violations,
            vec![Violation::NonFiniteReward { t: 1, s: 1, a: 1 }]
        );
    }
}
