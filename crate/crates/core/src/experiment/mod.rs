//! Scenario generation, experiment configs, and the run/sweep drivers with
//! their CSV and JSON outputs.

mod config;
mod output;
mod run;
mod scenario;
mod sweep;

pub use config::{AgentSpec, EvalSpec, ExperimentConfig, MixingSpec, OutputFormat, ScheduleSpec};
pub use output::{format_float, write_bound, write_instance};
pub use run::{execute, run, RunReport, StartSummary, Summary};
pub use scenario::{generate_scenario, generate_schedule, ScenarioSpec};
pub use sweep::{sweep, sweep_table, write_sweep, SweepRow};
