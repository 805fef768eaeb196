use serde::{Deserialize, Serialize};

use super::{model_error_terms, variation_terms, RegretDecomposition};
use crate::controller::UpdateRecord;
use crate::error::{Error, Result};
use crate::model::{TvMdp, UpdateSchedule};
use crate::oracle::MixingCertificate;

/// Bound pieces attached to one update time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateBound {
    pub time: usize,
    pub horizon: usize,
    pub w_tilde: f64,
    pub eps_hat: Vec<f64>,
    pub delta_hat: Vec<f64>,
    pub delta_hat_span: Vec<f64>,
    /// `ê_{t,j} = ε̂_{t,j} W̃_t + δ̂_{t,j}`.
    pub e_hat: Vec<f64>,
    /// `α^{⌊(H_t − 1)/m⌋} Ṽ`.
    pub truncation: f64,
    /// `Ê_t`.
    pub error: f64,
}

impl UpdateBound {
    /// `α^{⌊(H_t − 1)/m⌋} Ṽ + Ê_t`, the per-update bound on `Δ_t`.
    pub fn term(&self) -> f64 {
        self.truncation + self.error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepBound {
    pub t: usize,
    pub is_update: bool,
    pub last_update: usize,
    /// `α^{⌊(H_{τ_{k(t)}} − 1)/m⌋} Ṽ + Ê_{τ_{k(t)}}`.
    pub update_term: f64,
    /// `α^{⌊(T − t)/m⌋} Ṽ` at skip times, 0 otherwise.
    pub skip_truncation: f64,
    /// `Ē_t` at skip times, 0 otherwise.
    pub skip_error: f64,
    /// `ε̄_{τ,τ+j}` and `δ̄_{τ,τ+j}` for the offsets used by `Ē_t`.
    pub eps_bar: Vec<f64>,
    pub delta_bar: Vec<f64>,
}

impl StepBound {
    pub fn skip_term(&self) -> f64 {
        self.skip_truncation + self.skip_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub m: usize,
    pub alpha: f64,
    pub v_tilde: f64,
    pub updates: Vec<UpdateBound>,
    pub steps: Vec<StepBound>,
    pub total: f64,
}

impl BoundBreakdown {
    pub fn update_total(&self) -> f64 {
        self.steps.iter().map(|s| s.update_term).sum()
    }

    pub fn skip_total(&self) -> f64 {
        self.steps.iter().map(StepBound::skip_term).sum()
    }
}

fn pow(alpha: f64, k: usize) -> f64 {
    alpha.powi(k as i32)
}

/// Assembles the regret bound from the recorded plans.
pub fn regret_bound(
    mdp: &TvMdp,
    schedule: &UpdateSchedule,
    mixing: &MixingCertificate,
    v_tilde: f64,
    records: &[UpdateRecord],
    beta: f64,
) -> Result<BoundBreakdown> {
    mixing.require()?;
    let horizon = mdp.horizon();
    if records.len() != schedule.len() || records.iter().zip(schedule.times()).any(|(r, &t)| r.time != t) {
        return Err(Error::invalid("plan records do not match the update schedule"));
    }
    let (alpha, m) = (mixing.alpha, mixing.m);
    let mut updates = Vec::with_capacity(records.len());
    for rec in records {
        let h = rec.plan.horizon;
        let terms = model_error_terms(mdp, rec.kernel(), &rec.forecasts[..h], beta, rec.time)?;
        let w_tilde = rec.plan.w_span;
        let e_hat: Vec<f64> = terms
            .eps_hat
            .iter()
            .zip(&terms.delta_hat)
            .map(|(e, d)| e * w_tilde + d)
            .collect();
        let blocks = (h - 1) / m;
        let mut error = terms.delta_hat[0] + terms.eps_hat[0] * v_tilde;
        for l in 0..blocks {
            let inner: f64 = (1..=m).map(|i| e_hat[l * m + i]).sum();
            error += 2.0 * pow(alpha, l) * inner;
        }
        let tail: f64 = (1..h - blocks * m).map(|i| e_hat[blocks * m + i]).sum();
        error += 2.0 * pow(alpha, blocks) * tail;
        updates.push(UpdateBound {
            time: rec.time,
            horizon: h,
            w_tilde,
            eps_hat: terms.eps_hat,
            delta_hat: terms.delta_hat,
            delta_hat_span: terms.delta_hat_span,
            e_hat,
            truncation: pow(alpha, blocks) * v_tilde,
            error,
        });
    }
    let mut steps = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let k = schedule.last_update_index(t);
        let tau = schedule.time(k);
        let is_update = tau == t;
        let mut step = StepBound {
            t,
            is_update,
            last_update: tau,
            update_term: updates[k].term(),
            skip_truncation: 0.0,
            skip_error: 0.0,
            eps_bar: Vec::new(),
            delta_bar: Vec::new(),
        };
        if !is_update {
            let rest = horizon - t;
            let blocks = rest / m;
            let max_offset = (t - tau).max(rest);
            for j in 0..=max_offset {
                let v = variation_terms(mdp, tau, (tau + j).min(horizon - 1))?;
                step.eps_bar.push(v.eps_bar);
                step.delta_bar.push(v.delta_bar);
            }
            let e_bar = |j: usize| step.eps_bar[j] * v_tilde + step.delta_bar[j];
            let mut error = e_bar(t - tau);
            for l in 0..blocks {
                let inner: f64 = (0..m).map(|i| e_bar(l * m + i)).sum();
                error += 2.0 * pow(alpha, l) * inner;
            }
            let tail: f64 = (0..=rest - blocks * m).map(|i| e_bar(blocks * m + i)).sum();
            error += 2.0 * pow(alpha, blocks) * tail;
            step.skip_truncation = pow(alpha, blocks) * v_tilde;
            step.skip_error = error;
        }
        steps.push(step);
    }
    let total = steps.iter().map(|s| s.update_term + s.skip_term()).sum();
    Ok(BoundBreakdown {
        m,
        alpha,
        v_tilde,
        updates,
        steps,
        total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateStepRow {
    pub t: usize,
    pub s0: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `Δ_t(s₀) ≤ α^{⌊(H_t−1)/m⌋} Ṽ + Ê_t` at every update time and start state.
pub fn update_step_check(decomp: &RegretDecomposition, bound: &BoundBreakdown, tol: f64) -> Vec<UpdateStepRow> {
    let mut rows = Vec::new();
    for u in &bound.updates {
        for (s0, delta) in decomp.delta.iter().enumerate() {
            let (lhs, rhs) = (delta[u.time], u.term());
            rows.push(UpdateStepRow {
                t: u.time,
                s0,
                lhs,
                rhs,
                holds: lhs <= rhs + tol,
            });
        }
    }
    rows
}
