use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::output::{bound_table, write_json, Table};
use super::{generate_scenario, generate_schedule, write_instance, ExperimentConfig};
use crate::analysis::{per_step_regret, regret_bound, BoundBreakdown, RegretDecomposition};
use crate::controller::{
    dynamic_regret, effective_policies, exact_evaluate, monte_carlo, run_episode, DynamicRegret, Episode,
    ExactEvaluation, MonteCarloEstimate, Trajectory,
};
use crate::error::{Error, Result};
use crate::model::{TvMdp, UpdateSchedule};
use crate::oracle::{certify_mixing, solve_oracle, span_bounds, MixingCertificate, ValueTables};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub s0: usize,
    pub optimal_return: f64,
    pub algorithm_return: f64,
    pub regret: f64,
    pub delta_sum: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub dr_exact: f64,
    pub worst_start: usize,
    pub dr_mc: Option<f64>,
    pub dr_mc_stderr: Option<f64>,
    /// Omitted when the mixing certificate fails.
    pub bound_total: Option<f64>,
    pub bound_update_total: Option<f64>,
    pub bound_skip_total: Option<f64>,
    pub assumption_violated: bool,
    pub m: usize,
    pub eta: f64,
    pub alpha: f64,
    pub v_tilde: f64,
    pub max_telescoping_residual: f64,
    pub n_updates: usize,
    pub per_start: Vec<StartSummary>,
}

/// Everything a run produced. Stages that failed or were not reached are `None`.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub mdp: Option<TvMdp>,
    pub schedule: Option<UpdateSchedule>,
    pub tables: Option<ValueTables>,
    pub episode: Option<Episode>,
    pub evaluation: Option<ExactEvaluation>,
    pub regret: Option<DynamicRegret>,
    pub decomposition: Option<RegretDecomposition>,
    pub certificate: Option<MixingCertificate>,
    pub bound: Option<BoundBreakdown>,
    pub monte_carlo: Vec<MonteCarloEstimate>,
    pub summary: Option<Summary>,
    /// Wall-clock seconds per stage.
    pub timing: Vec<(String, f64)>,
}

impl RunReport {
    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        self.timing.push((stage.to_string(), start.elapsed().as_secs_f64()));
        out
    }
}

fn mc_seed(seed: u64, s0: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (s0 as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn stages(config: &ExperimentConfig, rep: &mut RunReport) -> Result<()> {
    config.validate()?;
    let mdp = rep.timed("generate", |_| generate_scenario(&config.scenario, config.horizon))?;
    let schedule = generate_schedule(&config.schedule, config.horizon)?;
    if config.initial_state >= mdp.n_states() {
        return Err(Error::Config(format!(
            "initial_state {} is outside the {} states",
            config.initial_state,
            mdp.n_states()
        )));
    }
    rep.mdp = Some(mdp.clone());
    rep.schedule = Some(schedule.clone());
    let tables = rep.timed("oracle", |_| solve_oracle(&mdp))?;
    rep.tables = Some(tables.clone());
    let agent = config.agent.agent();
    let episode = rep.timed("episode", |_| {
        run_episode(&mdp, &schedule, &agent, config.initial_state, config.seed)
    })?;
    rep.episode = Some(episode.clone());
    if !config.eval.exact {
        return Ok(());
    }
    let eval = rep.timed("exact", |_| exact_evaluate(&mdp, &episode.executed))?;
    rep.evaluation = Some(eval.clone());
    let regret = dynamic_regret(&tables, &eval);
    rep.regret = Some(regret.clone());
    let decomp = rep.timed("decompose", |_| per_step_regret(&mdp, &tables, &eval, &episode.executed))?;
    rep.decomposition = Some(decomp.clone());
    let effective = effective_policies(&eval, &episode.executed)?;
    let cert = rep.timed("certify", |_| {
        certify_mixing(&mdp, &effective, &tables.greedy_policies(), config.mixing.m)
    })?;
    rep.certificate = Some(cert.clone());
    let v_tilde = span_bounds(&tables);
    let bound = if cert.holds() {
        Some(rep.timed("bound", |_| {
            regret_bound(&mdp, &schedule, &cert, v_tilde, &episode.updates, agent.beta)
        })?)
    } else {
        None
    };
    rep.bound = bound.clone();
    if config.eval.mc_rollouts > 0 {
        let mc = rep.timed("monte_carlo", |_| {
            (0..mdp.n_states())
                .map(|s0| {
                    monte_carlo(&mdp, &episode.executed, s0, config.eval.mc_rollouts, mc_seed(config.seed, s0))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        rep.monte_carlo = mc;
    }
    let residual = decomp.telescoping_residual();
    let optimal = tables.optimal_return();
    let per_start = (0..mdp.n_states())
        .map(|s0| StartSummary {
            s0,
            optimal_return: optimal[s0],
            algorithm_return: eval.values[s0],
            regret: regret.per_start[s0],
            delta_sum: decomp.delta[s0].iter().sum(),
            mc_mean: rep.monte_carlo.get(s0).map(|e| e.mean),
            mc_stderr: rep.monte_carlo.get(s0).map(|e| e.stderr),
        })
        .collect();
    let worst = regret.worst_start;
    let mc_worst = rep.monte_carlo.get(worst);
    rep.summary = Some(Summary {
        dr_exact: regret.value,
        worst_start: worst,
        dr_mc: mc_worst.map(|e| optimal[worst] - e.mean),
        dr_mc_stderr: mc_worst.map(|e| e.stderr),
        bound_total: bound.as_ref().map(|b| b.total),
        bound_update_total: bound.as_ref().map(BoundBreakdown::update_total),
        bound_skip_total: bound.as_ref().map(BoundBreakdown::skip_total),
        assumption_violated: !cert.holds(),
        m: cert.m,
        eta: cert.eta,
        alpha: cert.alpha,
        v_tilde,
        max_telescoping_residual: residual.iter().fold(0.0, |a, r| a.max(r.abs())),
        n_updates: schedule.len(),
        per_start,
    });
    Ok(())
}

/// Runs every stage in memory.
pub fn execute(config: &ExperimentConfig) -> Result<RunReport> {
    let mut rep = RunReport::default();
    stages(config, &mut rep)?;
    Ok(rep)
}

fn trajectory_table(traj: &Trajectory, expected: Option<&[f64]>) -> Table {
    let mut table = Table::new(&["t", "is_update", "state", "input", "action", "reward", "expected_reward"]);
    for (step, &r) in traj.steps.iter().zip(&traj.rewards) {
        table.push(vec![
            step.t.into(),
            step.is_update.into(),
            step.state.into(),
            step.input.into(),
            step.action.into(),
            r.into(),
            expected.map(|e| e[step.t]).into(),
        ]);
    }
    table
}

fn regret_table(rep: &RunReport) -> Option<Table> {
    let decomp = rep.decomposition.as_ref()?;
    let schedule = rep.schedule.as_ref()?;
    let s0 = rep.regret.as_ref()?.worst_start;
    let mut table = Table::new(&[
        "t",
        "is_update",
        "delta_t",
        "cum_regret",
        "bound_update_term",
        "bound_skip_term",
        "cum_bound",
    ]);
    let (mut cum, mut cum_bound) = (0.0, 0.0);
    for (t, &d) in decomp.delta[s0].iter().enumerate() {
        cum += d;
        let step = rep.bound.as_ref().map(|b| &b.steps[t]);
        let terms = step.map(|s| (s.update_term, s.skip_term()));
        if let Some((u, k)) = terms {
            cum_bound += u + k;
        }
        table.push(vec![
            t.into(),
            schedule.is_update(t).into(),
            d.into(),
            cum.into(),
            terms.map(|x| x.0).into(),
            terms.map(|x| x.1).into(),
            terms.map(|_| cum_bound).into(),
        ]);
    }
    Some(table)
}

fn write_bundle(config: &ExperimentConfig, rep: &RunReport, dir: &Path) -> Result<()> {
    let format = config.output_format;
    write_json(&dir.join("config.json"), config)?;
    if let (Some(mdp), Some(schedule)) = (&rep.mdp, &rep.schedule) {
        write_instance(dir, mdp, schedule)?;
    }
    if let Some(ep) = &rep.episode {
        let traj = &ep.trajectory;
        let expected = rep.evaluation.as_ref().map(|e| e.expected_rewards[traj.initial_state].as_slice());
        trajectory_table(traj, expected).write(dir, "trajectory", format)?;
    }
    if let Some(t) = regret_table(rep) {
        t.write(dir, "regret", format)?;
    }
    if let Some(b) = &rep.bound {
        bound_table(b).write(dir, "bound", format)?;
    }
    if let Some(s) = &rep.summary {
        write_json(&dir.join("summary.json"), s)?;
    }
    let timing: serde_json::Map<String, serde_json::Value> =
        rep.timing.iter().map(|(k, v)| (k.clone(), (*v).into())).collect();
    write_json(&dir.join("timing.json"), &timing)
}

#[derive(Serialize)]
struct ErrorDoc {
    kind: &'static str,
    message: String,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::Validation(_) => "validation",
        Error::Convergence { .. } => "convergence",
        Error::InternalConsistency(_) => "internal_consistency",
        Error::AssumptionViolated(_) => "assumption_violated",
        Error::Config(_) => "config",
        Error::Episode { .. } => "episode",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// Runs and writes the output bundle into `out_dir`. On failure the bundle
/// holds `error.json` and whatever the finished stages produced.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    fs::create_dir_all(out_dir)?;
    let mut rep = RunReport::default();
    let outcome = stages(config, &mut rep);
    write_bundle(config, &rep, out_dir)?;
    if let Err(Error::Episode { partial, .. }) = &outcome {
        trajectory_table(partial, None).write(out_dir, "trajectory", config.output_format)?;
    }
    match outcome {
        Ok(()) => Ok(rep),
        Err(e) => {
            write_json(
                &out_dir.join("error.json"),
                &ErrorDoc {
                    kind: error_kind(&e),
                    message: e.to_string(),
                },
            )?;
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::ModelSource;
    use crate::experiment::{ScenarioSpec, ScheduleSpec};

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default_drifting();
        c.horizon = 8;
        c.schedule = ScheduleSpec::Periodic { period: 2 };
        c
    }

    #[test]
    fn oracle_model_every_step_has_no_regret() {
        let mut c = small();
        c.scenario = ScenarioSpec::TwoStateRotating { amplitude: 0.0, angular_rate: 0.0 };
        c.schedule = ScheduleSpec::Periodic { period: 1 };
        c.agent.model = ModelSource::Oracle;
        c.agent.h_bar = c.horizon;
        let s = execute(&c).unwrap().summary.unwrap();
        assert!(s.dr_exact.abs() <= 1e-8, "{}", s.dr_exact);
    }

    #[test]
    fn regret_rows_sum_to_summary() {
        let dir = tempfile::tempdir().unwrap();
        let rep = run(&small(), dir.path()).unwrap();
        let s = rep.summary.unwrap();
        let text = fs::read_to_string(dir.path().join("regret.csv")).unwrap();
        let last = text.lines().last().unwrap();
        let cum: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
        assert!((cum - s.dr_exact).abs() <= 1e-8);
        assert!(dir.path().join("summary.json").exists());
        assert!(!dir.path().join("error.json").exists());
    }

    #[test]
    fn failures_leave_error_json_and_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small();
        c.initial_state = 99;
        assert!(matches!(run(&c, dir.path()), Err(Error::Config(_))));
        assert!(dir.path().join("error.json").exists());
        assert!(dir.path().join("config.json").exists());
        assert!(!dir.path().join("summary.json").exists());
    }
}
