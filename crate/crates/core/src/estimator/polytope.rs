use serde::{Deserialize, Serialize};

use super::lp::{LinearProgram, Relation};
use super::{check_drift, pair_chain, ChainEstimate, PairChain, TransitionDataset, MERGE_TOL};
use crate::error::{Error, Result};

/// Coordinate ranges `[lo, hi]` of the next-state distribution at one time,
/// with the per-pair diameter `u(s, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyIntervals {
    pub time: usize,
    n_states: usize,
    n_actions: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    diameters: Vec<f64>,
}

impl UncertaintyIntervals {
    /// Intervals from flat `[(s·A + a)·S + s']` bound tables.
    pub fn from_bounds(time: usize, n_states: usize, n_actions: usize, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let len = n_states * n_actions * n_states;
        if lo.len() != len || hi.len() != len {
            return Err(Error::invalid("interval tables have the wrong size"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(0.0 <= *l && l <= h && *h <= 1.0)) {
            return Err(Error::invalid("intervals must satisfy 0 ≤ lo ≤ hi ≤ 1"));
        }
        let diameters = (0..n_states * n_actions)
            .map(|p| uncertainty_diameter(&lo[p * n_states..(p + 1) * n_states], &hi[p * n_states..(p + 1) * n_states]))
            .collect();
        Ok(Self {
            time,
            n_states,
            n_actions,
            lo,
            hi,
            diameters,
        })
    }

    /// The whole simplex for every pair (no data).
    pub fn full(time: usize, n_states: usize, n_actions: usize) -> Self {
        let len = n_states * n_actions * n_states;
        let lo = if n_states == 1 { vec![1.0; len] } else { vec![0.0; len] };
        Self::from_bounds(time, n_states, n_actions, lo, vec![1.0; len]).expect("valid bounds")
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn interval(&self, s: usize, a: usize, next: usize) -> (f64, f64) {
        let i = (s * self.n_actions + a) * self.n_states + next;
        (self.lo[i], self.hi[i])
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    pub fn diameter(&self, s: usize, a: usize) -> f64 {
        self.diameters[s * self.n_actions + a]
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }
}

/// `min(1, ½ Σ_{s'} (hi − lo))`.
pub fn uncertainty_diameter(lo: &[f64], hi: &[f64]) -> f64 {
    (0.5 * lo.iter().zip(hi).map(|(l, h)| h - l).sum::<f64>()).clamp(0.0, 1.0)
}

/// Range of `P̃_{τ_{k(t)}}(s' | s, a)` over the solution polytope at the latest update time.
pub fn polytope_coordinate_range(
    data: &TransitionDataset,
    drift: &[f64],
    estimate: &ChainEstimate,
    s: usize,
    a: usize,
    next: usize,
) -> Result<(f64, f64)> {
    let time = latest(data)?;
    let ranges = pair_ranges(data, drift, estimate, s, a, time)?;
    ranges
        .get(next)
        .copied()
        .ok_or_else(|| Error::invalid(format!("next state {next} out of range")))
}

pub fn uncertainty_intervals(data: &TransitionDataset, drift: &[f64], estimate: &ChainEstimate) -> Result<UncertaintyIntervals> {
    uncertainty_intervals_at(data, drift, estimate, latest(data)?)
}

/// Coordinate ranges at `time ≥` the latest update, linked to the chain by the drift budget.
pub fn uncertainty_intervals_at(
    data: &TransitionDataset,
    drift: &[f64],
    estimate: &ChainEstimate,
    time: usize,
) -> Result<UncertaintyIntervals> {
    let (n, m) = (data.n_states(), data.n_actions());
    let mut lo = Vec::with_capacity(n * m * n);
    let mut hi = Vec::with_capacity(n * m * n);
    for s in 0..n {
        for a in 0..m {
            for (l, h) in pair_ranges(data, drift, estimate, s, a, time)? {
                lo.push(l);
                hi.push(h);
            }
        }
    }
    UncertaintyIntervals::from_bounds(time, n, m, lo, hi)
}

fn latest(data: &TransitionDataset) -> Result<usize> {
    data.latest_time()
        .ok_or_else(|| Error::invalid("coordinate ranges need at least one transition"))
}

fn pair_ranges(
    data: &TransitionDataset,
    drift: &[f64],
    estimate: &ChainEstimate,
    s: usize,
    a: usize,
    time: usize,
) -> Result<Vec<(f64, f64)>> {
    let n = data.n_states();
    if s >= n || a >= data.n_actions() {
        return Err(Error::invalid(format!("pair ({s}, {a}) out of range")));
    }
    check_drift(data, drift)?;
    if estimate.times != data.times() {
        return Err(Error::invalid("estimate does not match the dataset"));
    }
    let last = latest(data)?;
    if time < last || time > drift.len() {
        return Err(Error::invalid(format!("query time {time} must lie in [{last}, {}]", drift.len())));
    }
    let Some(chain) = pair_chain(data, drift, s, a) else {
        let lo = if n == 1 { 1.0 } else { 0.0 };
        return Ok(vec![(lo, 1.0); n]);
    };
    let pinned = pinned_values(&chain, estimate, s, a);
    let last_group = chain.groups() - 1;
    let tail: f64 = drift[chain.group_last_time[last_group]..time].iter().sum();
    let separate_query = tail > MERGE_TOL;
    let nodes = chain.groups() + usize::from(separate_query);
    let query = nodes - 1;
    let mut lp = LinearProgram::new(nodes * n);
    let var = |g: usize, y: usize| g * n + y;
    for g in 0..nodes {
        let terms: Vec<(usize, f64)> = (0..n).map(|y| (var(g, y), 1.0)).collect();
        lp.add_sparse(&terms, Relation::Eq, 1.0);
    }
    for g in 0..chain.groups() {
        for y in 0..n {
            if let Some(v) = pinned[g][y] {
                lp.add_sparse(&[(var(g, y), 1.0)], Relation::Eq, v);
            }
        }
    }
    for g in 1..nodes {
        let b = if g < chain.groups() { chain.budgets[g] } else { tail };
        for y in 0..n {
            lp.add_sparse(&[(var(g, y), 1.0), (var(g - 1, y), -1.0)], Relation::Le, b);
            lp.add_sparse(&[(var(g, y), -1.0), (var(g - 1, y), 1.0)], Relation::Le, b);
        }
    }
    let feasible = lp.feasible()?.ok_or_else(|| {
        Error::InternalConsistency(format!("range LP for pair ({s}, {a}) is infeasible"))
    })?;
    let mut out = Vec::with_capacity(n);
    for y in 0..n {
        if !separate_query {
            if let Some(v) = pinned[last_group][y] {
                out.push((v, v));
                continue;
            }
        }
        let mut c = vec![0.0; nodes * n];
        c[var(query, y)] = 1.0;
        let lo = feasible.minimize(&c)?.value.clamp(0.0, 1.0) + 0.0;
        let hi = feasible.maximize(&c)?.value.clamp(0.0, 1.0);
        out.push((lo.min(hi), hi));
    }
    Ok(out)
}

fn pinned_values(chain: &PairChain, estimate: &ChainEstimate, s: usize, a: usize) -> Vec<Vec<Option<f64>>> {
    let n = chain.counts[0].len();
    (0..chain.groups())
        .map(|g| {
            let t = chain.group_last_time[g];
            let k = estimate.times.binary_search(&t).expect("group time is an update time");
            (0..n)
                .map(|y| chain.observed(g, y).then(|| estimate.kernels[k].prob(s, a, y)))
                .collect()
        })
        .collect()
}
