//! Brute-force reference computations. Each one is written directly from the
//! definitions and shares no code with the library beyond its data types.

use tvmdp::controller::ExecutedPolicies;
use tvmdp::estimator::{ChainEstimate, TransitionDataset};
use tvmdp::model::{ControlledKernel, MarkovPolicy, RewardTable, TvMdp};

/// `V_t(s)` for `t ∈ [0, T]` under a deterministic Markov policy `actions[t][s]`.
pub fn policy_values(mdp: &TvMdp, actions: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let (n, horizon) = (mdp.n_states(), mdp.horizon());
    let mut values = vec![vec![0.0; n]; horizon + 1];
    for t in (0..horizon).rev() {
        for s in 0..n {
            let a = actions[t][s];
            let future: f64 = (0..n).map(|y| mdp.kernel(t).prob(s, a, y) * values[t + 1][y]).sum();
            values[t][s] = mdp.reward(t).get(s, a) + future;
        }
    }
    values
}

/// Calls `f` with every map from `slots` decisions to `[0, m)`.
fn for_each_assignment(slots: usize, m: usize, mut f: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; slots];
    loop {
        f(&digits);
        let mut i = 0;
        loop {
            if i == slots {
                return;
            }
            digits[i] += 1;
            if digits[i] < m {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// `max_π V^π_0(s₀)` per start state over all deterministic Markov policy sequences.
pub fn brute_force_optimal(mdp: &TvMdp) -> Vec<f64> {
    let (n, m, horizon) = (mdp.n_states(), mdp.n_actions(), mdp.horizon());
    let mut best = vec![f64::NEG_INFINITY; n];
    for_each_assignment(n * horizon, m, |digits| {
        let actions: Vec<Vec<usize>> = digits.chunks(n).map(<[usize]>::to_vec).collect();
        let v = policy_values(mdp, &actions);
        for (b, x) in best.iter_mut().zip(&v[0]) {
            *b = b.max(*x);
        }
    });
    best
}

/// Best `H`-step return per start state under a frozen kernel, by enumeration.
pub fn brute_force_plan_value(kernel: &ControlledKernel, rewards: &[RewardTable]) -> Vec<f64> {
    let (n, m, h) = (kernel.n_states(), kernel.n_actions(), rewards.len());
    let mut best = vec![f64::NEG_INFINITY; n];
    for_each_assignment(n * h, m, |digits| {
        let mut v = vec![0.0; n];
        for k in (0..h).rev() {
            v = (0..n)
                .map(|s| {
                    let a = digits[k * n + s];
                    rewards[k].get(s, a) + (0..n).map(|y| kernel.prob(s, a, y) * v[y]).sum::<f64>()
                })
                .collect();
        }
        for (b, x) in best.iter_mut().zip(&v) {
            *b = b.max(*x);
        }
    });
    best
}

/// Expected return of the recorded policies from `s0`, summing over every
/// path of (state, last observed state, action). Exponential in `T`.
pub fn tree_value(mdp: &TvMdp, executed: &ExecutedPolicies, s0: usize) -> f64 {
    fn go(mdp: &TvMdp, ex: &ExecutedPolicies, t: usize, s: usize, stale: usize) -> f64 {
        if t == mdp.horizon() {
            return 0.0;
        }
        let update = ex.schedule.times().contains(&t);
        let input = if update { s } else { stale };
        let mut total = 0.0;
        for a in 0..mdp.n_actions() {
            let pa = ex.policies[t].prob(input, a);
            if pa == 0.0 {
                continue;
            }
            let mut future = 0.0;
            for y in 0..mdp.n_states() {
                let py = mdp.kernel(t).prob(s, a, y);
                if py > 0.0 {
                    future += py * go(mdp, ex, t + 1, y, if update { y } else { stale });
                }
            }
            total += pa * (mdp.reward(t).get(s, a) + future);
        }
        total
    }
    go(mdp, executed, 0, s0, s0)
}

/// `P(x_{t+m} = · | x_t = s)` under `policies`, by summing over all paths.
fn path_distribution(mdp: &TvMdp, policies: &[MarkovPolicy], t: usize, m: usize, s: usize) -> Vec<f64> {
    let n = mdp.n_states();
    let mut out = vec![0.0; n];
    fn walk(mdp: &TvMdp, pol: &[MarkovPolicy], k: usize, end: usize, s: usize, mass: f64, out: &mut [f64]) {
        if k == end {
            out[s] += mass;
            return;
        }
        for a in 0..mdp.n_actions() {
            let pa = pol[k].prob(s, a);
            for y in 0..mdp.n_states() {
                let p = mass * pa * mdp.kernel(k).prob(s, a, y);
                if p > 0.0 {
                    walk(mdp, pol, k + 1, end, y, p, out);
                }
            }
        }
    }
    walk(mdp, policies, t, t + m, s, 1.0, &mut out);
    out
}

/// `min_{s, s̄} Σ_y min(P¹(y | s), P²(y | s̄))` over the window `[t, t + m)`.
pub fn brute_force_overlap(mdp: &TvMdp, pi1: &[MarkovPolicy], pi2: &[MarkovPolicy], t: usize, m: usize) -> f64 {
    let n = mdp.n_states();
    let d1: Vec<Vec<f64>> = (0..n).map(|s| path_distribution(mdp, pi1, t, m, s)).collect();
    let d2: Vec<Vec<f64>> = (0..n).map(|s| path_distribution(mdp, pi2, t, m, s)).collect();
    let mut eta = f64::INFINITY;
    for a in &d1 {
        for b in &d2 {
            eta = eta.min(a.iter().zip(b).map(|(x, y)| x.min(*y)).sum());
        }
    }
    eta
}

/// `{x : A_eq x = b_eq, A_le x ≤ b_le}`.
#[derive(Debug, Clone, Default)]
pub struct Polytope {
    pub n_vars: usize,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

impl Polytope {
    fn feasible(&self, x: &[f64], tol: f64) -> bool {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        self.eq.iter().all(|(r, b)| (dot(r) - b).abs() <= tol) && self.le.iter().all(|(r, b)| dot(r) <= b + tol)
    }

    /// Every basic feasible point: all equalities plus enough tight inequalities
    /// to pin down `n_vars` coordinates, kept when the system is nonsingular.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let need = self.n_vars.saturating_sub(self.eq.len());
        let mut out = Vec::new();
        let mut pick = Vec::with_capacity(need);
        self.choose(0, need, &mut pick, &mut out);
        out
    }

    fn choose(&self, start: usize, need: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if pick.len() == need {
            let mut rows: Vec<(Vec<f64>, f64)> = self.eq.clone();
            rows.extend(pick.iter().map(|&i| self.le[i].clone()));
            if let Some(x) = self.solve_rows(&rows) {
                if self.feasible(&x, 1e-9) {
                    out.push(x);
                }
            }
            return;
        }
        for i in start..self.le.len() {
            pick.push(i);
            self.choose(i + 1, need, pick, out);
            pick.pop();
        }
    }

    /// Solves the (possibly over-determined) system through a nonsingular square subset.
    fn solve_rows(&self, rows: &[(Vec<f64>, f64)]) -> Option<Vec<f64>> {
        let n = self.n_vars;
        if rows.len() == n {
            let x = solve_square(rows.iter().map(|r| r.0.clone()).collect(), rows.iter().map(|r| r.1).collect())?;
            return rows
                .iter()
                .all(|(r, b)| (r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - b).abs() < 1e-9)
                .then_some(x);
        }
        // More equalities than unknowns: try every square subset.
        let mut idx = Vec::new();
        fn pick(k: usize, rows: usize, need: usize, idx: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
            if idx.len() == need {
                return f(idx);
            }
            for i in k..rows {
                idx.push(i);
                if pick(i + 1, rows, need, idx, f) {
                    return true;
                }
                idx.pop();
            }
            false
        }
        let mut found = None;
        pick(0, rows.len(), n, &mut idx, &mut |sel| {
            let a = sel.iter().map(|&i| rows[i].0.clone()).collect();
            let b = sel.iter().map(|&i| rows[i].1).collect();
            if let Some(x) = solve_square(a, b) {
                let ok = rows
                    .iter()
                    .all(|(r, b)| (r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - b).abs() < 1e-9);
                if ok {
                    found = Some(x);
                    return true;
                }
            }
            false
        });
        found
    }

    /// `(min, max)` of coordinate `i` over the vertices.
    pub fn coordinate_range(&self, i: usize) -> Option<(f64, f64)> {
        let v = self.vertices();
        if v.is_empty() {
            return None;
        }
        let lo = v.iter().map(|x| x[i]).fold(f64::INFINITY, f64::min);
        let hi = v.iter().map(|x| x[i]).fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }
}

/// The full chain polytope of one `(s, a)` row: one node per update time in
/// the data (plus `query` if later), simplex rows, drift links between
/// consecutive nodes, and the observed coordinates pinned to the estimate.
/// Returns the polytope and the node index of `query`.
pub fn chain_polytope(
    data: &TransitionDataset,
    drift: &[f64],
    estimate: &ChainEstimate,
    s: usize,
    a: usize,
    query: usize,
) -> (Polytope, usize) {
    let n = data.n_states();
    let mut times: Vec<usize> = data.triples().iter().map(|tr| tr.time).collect();
    times.sort_unstable();
    times.dedup();
    if query > *times.last().expect("nonempty data") {
        times.push(query);
    }
    let nodes = times.len();
    let n_vars = nodes * n;
    let unit = |i: usize, w: f64| {
        let mut r = vec![0.0; n_vars];
        r[i] = w;
        r
    };
    let mut poly = Polytope {
        n_vars,
        ..Polytope::default()
    };
    for g in 0..nodes {
        let mut r = vec![0.0; n_vars];
        r[g * n..(g + 1) * n].iter_mut().for_each(|x| *x = 1.0);
        poly.eq.push((r, 1.0));
    }
    for tr in data.triples().iter().filter(|tr| tr.state == s && tr.action == a) {
        let g = times.binary_search(&tr.time).expect("data time");
        let k = estimate.times.binary_search(&tr.time).expect("estimate time");
        let v = estimate.kernels[k].prob(s, a, tr.next);
        let row = unit(g * n + tr.next, 1.0);
        if !poly.eq.contains(&(row.clone(), v)) {
            poly.eq.push((row, v));
        }
    }
    for g in 1..nodes {
        let budget: f64 = drift[times[g - 1]..times[g]].iter().sum();
        for y in 0..n {
            let mut up = unit(g * n + y, 1.0);
            up[(g - 1) * n + y] = -1.0;
            let down: Vec<f64> = up.iter().map(|x| -x).collect();
            poly.le.push((up, budget));
            poly.le.push((down, budget));
        }
    }
    for i in 0..n_vars {
        poly.le.push((unit(i, -1.0), 0.0));
    }
    let q = times.binary_search(&query).expect("query node");
    (poly, q)
}

/// Maximum of the two-state constrained log-likelihood over a grid of step
/// `1 / cells` on each coordinate `P_t(0 | s, a)`, by dynamic programming
/// along each pair's observations with a sliding-window maximum.
pub fn grid_cmle_objective(data: &TransitionDataset, drift: &[f64], cells: usize) -> f64 {
    assert_eq!(data.n_states(), 2, "grid oracle covers two-state chains");
    let h = 1.0 / cells as f64;
    let logp = |i: usize, y: usize| {
        let p0 = i as f64 * h;
        let p = if y == 0 { p0 } else { 1.0 - p0 };
        if p <= 0.0 {
            f64::NEG_INFINITY
        } else {
            p.ln()
        }
    };
    let mut total = 0.0;
    for s in 0..2 {
        for a in 0..data.n_actions() {
            let mut obs: Vec<(usize, usize)> = data
                .triples()
                .iter()
                .filter(|tr| tr.state == s && tr.action == a)
                .map(|tr| (tr.time, tr.next))
                .collect();
            if obs.is_empty() {
                continue;
            }
            obs.sort_unstable();
            let mut best: Vec<f64> = (0..=cells).map(|i| logp(i, obs[0].1)).collect();
            for w in obs.windows(2) {
                let budget: f64 = drift[w[0].0..w[1].0].iter().sum();
                let reach = ((budget / h) + 1e-9).floor() as usize;
                let spread = window_max(&best, reach);
                best = (0..=cells).map(|i| spread[i] + logp(i, w[1].1)).collect();
            }
            total += best.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
    }
    total
}

/// `out[i] = max_{|j − i| ≤ r} v[j]`.
fn window_max(v: &[f64], r: usize) -> Vec<f64> {
    use std::collections::VecDeque;
    let n = v.len();
    let mut out = vec![f64::NEG_INFINITY; n];
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for i in 0..n {
        let hi = (i + r).min(n - 1);
        while next <= hi {
            while dq.back().is_some_and(|&j| v[j] <= v[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().is_some_and(|&j| j + r < i) {
            dq.pop_front();
        }
        out[i] = v[*dq.front().expect("window is nonempty")];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_max_matches_naive() {
        let v = [3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, 6.0];
        for r in 0..5 {
            let got = window_max(&v, r);
            for i in 0..v.len() {
                let lo = i.saturating_sub(r);
                let hi = (i + r).min(v.len() - 1);
                let want = v[lo..=hi].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(got[i], want);
            }
        }
    }

    #[test]
    fn square_box_vertices() {
        let mut p = Polytope {
            n_vars: 2,
            ..Polytope::default()
        };
        for i in 0..2 {
            let mut r = vec![0.0; 2];
            r[i] = 1.0;
            p.le.push((r.clone(), 1.0));
            r[i] = -1.0;
            p.le.push((r, 0.0));
        }
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.coordinate_range(1), Some((0.0, 1.0)));
    }
}
