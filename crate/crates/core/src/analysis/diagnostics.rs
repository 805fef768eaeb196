use serde::{Deserialize, Serialize};

use super::{variation_terms, RegretDecomposition};
use crate::error::{Error, Result};
use crate::model::{span_unchecked, tv_unchecked, TvMdp};
use crate::oracle::ValueTables;

/// The three pieces of a skip-time regret: inherited update regret, time
/// mismatch and state mismatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipDiagnostics {
    pub tau: usize,
    pub t: usize,
    /// Term (I): `Δ_τ(s₀)` per start state.
    pub inherited: Vec<f64>,
    pub eps_bar: f64,
    pub delta_bar: f64,
    /// `sp(V*_t − V*_τ)`.
    pub value_shift: f64,
    /// Term (II) bound: `δ̄ + ε̄ Ṽ + sp(V*_t − V*_τ)`.
    pub time_mismatch: f64,
    /// Term (III) bound: `max_s sp(r_t(s,·)) + max_{s,a,a′} ‖P_t(·|s,a) − P_t(·|s,a′)‖_tv Ṽ`.
    pub state_mismatch: f64,
}

pub fn skip_diagnostics(
    mdp: &TvMdp,
    tables: &ValueTables,
    decomp: &RegretDecomposition,
    v_tilde: f64,
    tau: usize,
    t: usize,
) -> Result<SkipDiagnostics> {
    if tau > t || t >= mdp.horizon() {
        return Err(Error::invalid(format!("need τ ≤ t < T, got τ = {tau}, t = {t}")));
    }
    let var = variation_terms(mdp, tau, t)?;
    let shift: Vec<f64> = tables.value(t).iter().zip(tables.value(tau)).map(|(a, b)| a - b).collect();
    let value_shift = span_unchecked(&shift);
    let (n, m) = (mdp.n_states(), mdp.n_actions());
    let reward_spread = (0..n).map(|s| span_unchecked(mdp.reward(t).row(s))).fold(0.0, f64::max);
    let mut action_tv = 0.0f64;
    let k = mdp.kernel(t);
    for s in 0..n {
        for a in 0..m {
            for b in 0..m {
                action_tv = action_tv.max(tv_unchecked(k.row(s, a), k.row(s, b)));
            }
        }
    }
    Ok(SkipDiagnostics {
        tau,
        t,
        inherited: decomp.delta.iter().map(|d| d[tau]).collect(),
        eps_bar: var.eps_bar,
        delta_bar: var.delta_bar,
        value_shift,
        time_mismatch: var.delta_bar + var.eps_bar * v_tilde + value_shift,
        state_mismatch: reward_spread + action_tv * v_tilde,
    })
}
