//! Backward induction shared by the oracle and the planner.

use crate::model::{ControlledKernel, RewardTable};

/// Relative tolerance for treating two Q-values as tied.
const TIE_TOL: f64 = 1e-12;

/// Lowest-index argmax with a relative tie tolerance; returns the exact max.
pub(crate) fn argmax(q: &[f64]) -> (usize, f64) {
    let best = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * best.abs().max(1.0);
    let idx = q.iter().position(|&v| v >= best - tol).unwrap_or(0);
    (idx, best)
}

pub(crate) struct Backward {
    /// `values[h]` for `h ∈ [0, H]`, terminal row zero.
    pub values: Vec<Vec<f64>>,
    /// `q[h][s * A + a]` for `h ∈ [0, H)`.
    pub q: Vec<Vec<f64>>,
    pub greedy: Vec<Vec<usize>>,
}

pub(crate) fn backward<'a>(
    n_states: usize,
    n_actions: usize,
    horizon: usize,
    kernel: impl Fn(usize) -> &'a ControlledKernel,
    reward: impl Fn(usize) -> &'a RewardTable,
) -> Backward {
    let mut values = vec![vec![0.0; n_states]; horizon + 1];
    let mut q = vec![Vec::new(); horizon];
    let mut greedy = vec![Vec::new(); horizon];
    for h in (0..horizon).rev() {
        let (p, r) = (kernel(h), reward(h));
        let next = &values[h + 1];
        let mut qh = vec![0.0; n_states * n_actions];
        let mut gh = vec![0; n_states];
        let mut vh = vec![0.0; n_states];
        for s in 0..n_states {
            for a in 0..n_actions {
                qh[s * n_actions + a] = r.get(s, a) + p.expect(s, a, next);
            }
            let (a, v) = argmax(&qh[s * n_actions..(s + 1) * n_actions]);
            gh[s] = a;
            vh[s] = v;
        }
        values[h] = vh;
        q[h] = qh;
        greedy[h] = gh;
    }
    Backward { values, q, greedy }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), (0, 1.0));
        assert_eq!(argmax(&[0.0, 2.0, 2.0 + 1e-14]).0, 1);
        assert_eq!(argmax(&[0.0, 2.0, 2.1]), (2, 2.1));
    }
}
