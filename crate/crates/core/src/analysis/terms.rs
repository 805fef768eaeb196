use serde::{Deserialize, Serialize};

use super::max_tv;
use crate::error::{Error, Result};
use crate::estimator::UncertaintyIntervals;
use crate::model::{span_unchecked, ControlledKernel, TvMdp};

/// Estimation and bonus errors of one plan, indexed by lookahead `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelErrorTerms {
    /// `ε̂_{t,i} = max_{s,a} ‖P_{t+i} − P̂_t‖_tv`.
    pub eps_hat: Vec<f64>,
    /// `δ̂_{t,i} = β max_{s,a} u_{t+i|t}(s, a)`.
    pub delta_hat: Vec<f64>,
    /// `max_s sp(u_{t+i|t}(s, ·))`, without `β`.
    pub delta_hat_span: Vec<f64>,
}

/// Terms for `i ∈ [0, forecasts.len())`, time indices clamped to `T − 1`.
pub fn model_error_terms(
    mdp: &TvMdp,
    kernel_hat: &ControlledKernel,
    forecasts: &[UncertaintyIntervals],
    beta: f64,
    t: usize,
) -> Result<ModelErrorTerms> {
    if kernel_hat.n_states() != mdp.n_states() || kernel_hat.n_actions() != mdp.n_actions() {
        return Err(Error::invalid("estimated kernel disagrees with the instance"));
    }
    let last = mdp.horizon() - 1;
    let (n, m) = (mdp.n_states(), mdp.n_actions());
    let mut out = ModelErrorTerms {
        eps_hat: Vec::with_capacity(forecasts.len()),
        delta_hat: Vec::with_capacity(forecasts.len()),
        delta_hat_span: Vec::with_capacity(forecasts.len()),
    };
    for (i, u) in forecasts.iter().enumerate() {
        out.eps_hat.push(max_tv(mdp.kernel((t + i).min(last)), kernel_hat));
        out.delta_hat.push(beta * u.max_diameter());
        let span = (0..n)
            .map(|s| span_unchecked(&(0..m).map(|a| u.diameter(s, a)).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        out.delta_hat_span.push(span);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationTerms {
    /// `ε̄_{τ,t} = max_{s,a} ‖P_t − P_τ‖_tv`.
    pub eps_bar: f64,
    /// `δ̄_{τ,t} = max_s sp(r_t(s, ·) − r_τ(s, ·))`.
    pub delta_bar: f64,
}

pub fn variation_terms(mdp: &TvMdp, tau: usize, t: usize) -> Result<VariationTerms> {
    if tau > t || t >= mdp.horizon() {
        return Err(Error::invalid(format!("need τ ≤ t < T, got τ = {tau}, t = {t}")));
    }
    let (rt, rtau) = (mdp.reward(t), mdp.reward(tau));
    let delta_bar = (0..mdp.n_states())
        .map(|s| {
            let diff: Vec<f64> = rt.row(s).iter().zip(rtau.row(s)).map(|(a, b)| a - b).collect();
            span_unchecked(&diff)
        })
        .fold(0.0, f64::max);
    Ok(VariationTerms {
        eps_bar: max_tv(mdp.kernel(t), mdp.kernel(tau)),
        delta_bar,
    })
}
