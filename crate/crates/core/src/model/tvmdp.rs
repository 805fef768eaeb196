use serde::{Deserialize, Serialize};

use super::{validate_instance, ControlledKernel, RewardTable, ValidationReport};
use crate::error::{Error, Result};

/// Finite-horizon time-varying MDP with its drift schedule `ε_t`.
///
/// Construction only checks shapes; [`validate_instance`] reports violated
/// invariants so that malformed instances can still be inspected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TvMdpDoc", into = "TvMdpDoc")]
pub struct TvMdp {
    n_states: usize,
    n_actions: usize,
    kernels: Vec<ControlledKernel>,
    rewards: Vec<RewardTable>,
    drift: Vec<f64>,
}

impl TvMdp {
    pub fn new(
        kernels: Vec<ControlledKernel>,
        rewards: Vec<RewardTable>,
        drift: Vec<f64>,
    ) -> Result<Self> {
        let first = kernels
            .first()
            .ok_or_else(|| Error::invalid("TVMDP needs a positive horizon"))?;
        let (n_states, n_actions) = (first.n_states(), first.n_actions());
        let horizon = kernels.len();
        if rewards.len() != horizon || drift.len() != horizon {
            return Err(Error::invalid(format!(
                "horizon mismatch: {} kernels, {} reward tables, {} drift entries",
                horizon,
                rewards.len(),
                drift.len()
            )));
        }
        if kernels
            .iter()
            .any(|k| k.n_states() != n_states || k.n_actions() != n_actions)
            || rewards
                .iter()
                .any(|r| r.n_states() != n_states || r.n_actions() != n_actions)
        {
            return Err(Error::invalid("kernel or reward tables disagree on |S| or |A|"));
        }
        Ok(Self {
            n_states,
            n_actions,
            kernels,
            rewards,
            drift,
        })
    }

    /// Builds the instance with the tight drift schedule
    /// `ε_t = max |P_{t+1} − P_t|` (and `ε_{T−1} = 0`).
    pub fn with_tight_drift(kernels: Vec<ControlledKernel>, rewards: Vec<RewardTable>) -> Result<Self> {
        let drift = tight_drift(&kernels);
        Self::new(kernels, rewards, drift)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn horizon(&self) -> usize {
        self.kernels.len()
    }

    pub fn kernel(&self, t: usize) -> &ControlledKernel {
        &self.kernels[t]
    }

    pub fn kernels(&self) -> &[ControlledKernel] {
        &self.kernels
    }

    pub fn reward(&self, t: usize) -> &RewardTable {
        &self.rewards[t]
    }

    pub fn rewards(&self) -> &[RewardTable] {
        &self.rewards
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    /// `Σ_{m=from}^{to-1} ε_m`.
    pub fn drift_budget(&self, from: usize, to: usize) -> f64 {
        self.drift[from..to].iter().sum()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_instance(self)
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(report))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn tight_drift(kernels: &[ControlledKernel]) -> Vec<f64> {
    let mut drift: Vec<f64> = kernels
        .windows(2)
        .map(|w| {
            w[0].as_slice()
                .iter()
                .zip(w[1].as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    drift.push(0.0);
    drift
}

#[derive(Serialize, Deserialize)]
struct TvMdpDoc {
    n_states: usize,
    n_actions: usize,
    horizon: usize,
    kernels: Vec<Vec<Vec<Vec<f64>>>>,
    rewards: Vec<Vec<Vec<f64>>>,
    drift: Vec<f64>,
}

impl From<TvMdp> for TvMdpDoc {
    fn from(m: TvMdp) -> Self {
        TvMdpDoc {
            n_states: m.n_states,
            n_actions: m.n_actions,
            horizon: m.horizon(),
            kernels: m.kernels.iter().map(ControlledKernel::to_nested).collect(),
            rewards: m.rewards.iter().map(RewardTable::to_nested).collect(),
            drift: m.drift,
        }
    }
}

impl TryFrom<TvMdpDoc> for TvMdp {
    type Error = Error;

    fn try_from(doc: TvMdpDoc) -> Result<Self> {
        let (n, m) = (doc.n_states, doc.n_actions);
        if doc.kernels.len() != doc.horizon {
            return Err(Error::invalid("kernels length differs from horizon"));
        }
        let mut kernels = Vec::with_capacity(doc.horizon);
        for (t, table) in doc.kernels.into_iter().enumerate() {
            let mut flat = Vec::with_capacity(n * m * n);
            if table.len() != n {
                return Err(Error::invalid(format!("kernel {t} has {} state rows", table.len())));
            }
            for per_action in table {
                if per_action.len() != m {
                    return Err(Error::invalid(format!("kernel {t} has a row with wrong |A|")));
                }
                for row in per_action {
                    if row.len() != n {
                        return Err(Error::invalid(format!("kernel {t} has a row with wrong |S|")));
                    }
                    flat.extend(row);
                }
            }
            kernels.push(ControlledKernel::new(n, m, flat)?);
        }
        let mut rewards = Vec::with_capacity(doc.rewards.len());
        for table in doc.rewards {
            let flat: Vec<f64> = table.into_iter().flatten().collect();
            rewards.push(RewardTable::new(n, m, flat)?);
        }
        TvMdp::new(kernels, rewards, doc.drift)
    }
}
