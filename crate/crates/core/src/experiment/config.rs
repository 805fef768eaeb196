use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ScenarioSpec;
use crate::controller::{AgentConfig, ModelSource};
use crate::error::{Error, Result};
use crate::estimator::{CmleInit, CmleOptions};
use crate::planner::HorizonRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Periodic { period: usize },
    Explicit { times: Vec<usize> },
    Random { density: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSpec {
    pub beta: f64,
    pub h_bar: usize,
    pub cmle_tol: f64,
    pub cmle_max_iters: usize,
    pub h_formula: HorizonRule,
    pub model: ModelSource,
}

impl Default for AgentSpec {
    fn default() -> Self {
        let a = AgentConfig::default();
        Self {
            beta: a.beta,
            h_bar: a.h_bar,
            cmle_tol: a.cmle.tol,
            cmle_max_iters: a.cmle.max_iters,
            h_formula: a.horizon_rule,
            model: a.model,
        }
    }
}

impl AgentSpec {
    pub fn agent(&self) -> AgentConfig {
        AgentConfig {
            beta: self.beta,
            h_bar: self.h_bar,
            horizon_rule: self.h_formula,
            cmle: CmleOptions {
                tol: self.cmle_tol,
                max_iters: self.cmle_max_iters,
                init: CmleInit::Uniform,
            },
            model: self.model,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixingSpec {
    pub m: usize,
}

impl Default for MixingSpec {
    fn default() -> Self {
        Self { m: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSpec {
    pub exact: bool,
    pub mc_rollouts: usize,
}

impl Default for EvalSpec {
    fn default() -> Self {
        Self {
            exact: true,
            mc_rollouts: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub horizon: usize,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub agent: AgentSpec,
    #[serde(default)]
    pub mixing: MixingSpec,
    #[serde(default)]
    pub eval: EvalSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub initial_state: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub output_format: OutputFormat,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// A small drifting instance: 3 states, 2 actions, per-step budget 0.05.
    pub fn default_drifting() -> Self {
        Self {
            scenario: ScenarioSpec::RandomDrift {
                n_states: 3,
                n_actions: 2,
                drift: 0.05,
                seed: 7,
            },
            horizon: 24,
            schedule: ScheduleSpec::Periodic { period: 1 },
            agent: AgentSpec::default(),
            mixing: MixingSpec::default(),
            eval: EvalSpec::default(),
            seed: 1,
            initial_state: 0,
            output_dir: default_output_dir(),
            output_format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if !(self.agent.beta >= 0.0) || self.agent.h_bar == 0 || !(self.agent.cmle_tol > 0.0) {
            return Err(Error::Config("agent needs β ≥ 0, H̄ ≥ 1 and a positive CMLE tolerance".into()));
        }
        if self.mixing.m == 0 || self.mixing.m > self.horizon {
            return Err(Error::Config(format!("mixing block m must lie in [1, {}]", self.horizon)));
        }
        if self.eval.mc_rollouts == 1 {
            return Err(Error::Config("mc_rollouts must be 0 or at least 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"scenario": {"type": "two_state_rotating", "amplitude": 0.2, "angular_rate": 0.3},
                "horizon": 10, "schedule": {"type": "periodic", "period": 2}}"#,
        )
        .unwrap();
        assert_eq!(cfg.mixing.m, 1);
        assert!(cfg.eval.exact);
        assert_eq!(cfg.agent, AgentSpec::default());
        assert_eq!(cfg.output_format, OutputFormat::Csv);
        let again = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        let err = ExperimentConfig::from_json(
            r#"{"scenario": {"type": "two_state_rotating", "amplitude": 0.2, "angular_rate": 0.3},
                "horizon": 10, "schedule": {"type": "periodic", "period": 2}, "colour": 1}"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
