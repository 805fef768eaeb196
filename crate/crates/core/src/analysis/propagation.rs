use serde::{Deserialize, Serialize};

use super::max_tv;
use crate::error::{Error, Result};
use crate::model::{span_unchecked, TvMdp};
use crate::oracle::{overlap_coefficient, solve_oracle, ValueTables};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub eta: f64,
    pub alpha: f64,
    /// `ε̄_k`, `δ̄_k` for `k ∈ [t, t + N)`.
    pub eps_bar: Vec<f64>,
    pub delta_bar: Vec<f64>,
    pub holds: bool,
}

/// Checks the multi-stage propagation inequality between the optimal values of
/// two instances over `[t, t + N]`.
///
/// `η` is the smallest overlap of the two optimal policies over the length-`m`
/// windows inside `[t, t + N)`, both run on the first instance. A supplied `η`
/// must not exceed it.
pub fn propagation_check(
    first: &TvMdp,
    second: &TvMdp,
    m: usize,
    eta: Option<f64>,
    t: usize,
    n: usize,
) -> Result<PropagationReport> {
    let horizon = first.horizon();
    if second.horizon() != horizon || second.n_states() != first.n_states() || second.n_actions() != first.n_actions() {
        return Err(Error::invalid("the two instances must share shape and horizon"));
    }
    if m == 0 || n == 0 || t + n > horizon {
        return Err(Error::invalid(format!(
            "need m ≥ 1 and 1 ≤ N ≤ T − t, got m = {m}, N = {n}, t = {t}, T = {horizon}"
        )));
    }
    let v = solve_oracle(first)?;
    let vb = solve_oracle(second)?;
    let measured = window_overlap(first, &v, &vb, m, t, n)?;
    let eta = match eta {
        Some(e) if e > measured + 1e-12 => {
            return Err(Error::invalid(format!(
                "supplied η = {e} exceeds the measured overlap {measured}"
            )))
        }
        Some(e) => e,
        None => measured,
    };
    let alpha = 1.0 - eta;
    let eps = |k: usize| if k < horizon { max_tv(first.kernel(k), second.kernel(k)) } else { 0.0 };
    let dlt = |k: usize| {
        if k < horizon {
            first.reward(k)
                .as_slice()
                .iter()
                .zip(second.reward(k).as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        } else {
            0.0
        }
    };
    let sp_bar = |k: usize| span_unchecked(vb.value(k.min(horizon)));
    let diff = |k: usize| {
        let d: Vec<f64> = v.value(k).iter().zip(vb.value(k)).map(|(a, b)| a - b).collect();
        span_unchecked(&d)
    };
    let blocks = n / m;
    let a_l = alpha.powi(blocks as i32);
    let mut rhs = a_l * diff(t + n);
    let tail: f64 = (1..n - blocks * m)
        .map(|i| eps(t + blocks * m + i) * sp_bar(t + blocks * m + 1) + dlt(t + blocks * m + i))
        .sum();
    rhs += 2.0 * a_l * tail;
    for l in 0..blocks {
        let inner: f64 = (1..=m)
            .map(|i| eps(t + l * m + i) * sp_bar(t + (l + 1) * m + 1) + dlt(t + l * m + i))
            .sum();
        rhs += 2.0 * alpha.powi(l as i32) * inner;
    }
    let lhs = diff(t);
    Ok(PropagationReport {
        lhs,
        rhs,
        eta,
        alpha,
        eps_bar: (t..t + n).map(eps).collect(),
        delta_bar: (t..t + n).map(dlt).collect(),
        holds: lhs <= rhs + 1e-8,
    })
}

fn window_overlap(mdp: &TvMdp, v: &ValueTables, vb: &ValueTables, m: usize, t: usize, n: usize) -> Result<f64> {
    if n < m {
        return Ok(0.0);
    }
    let (p1, p2) = (v.greedy_policies(), vb.greedy_policies());
    let mut eta = 1.0f64;
    for w in t..=t + n - m {
        eta = eta.min(overlap_coefficient(mdp, &p1, &p2, w, m)?);
    }
    Ok(eta)
}
