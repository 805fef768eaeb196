use std::fs;

use tvmdp::controller::ModelSource;
use tvmdp::experiment::{execute, run, sweep, ExperimentConfig, OutputFormat, ScenarioSpec, ScheduleSpec};

fn config(period: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::default_drifting();
    c.horizon = 12;
    c.schedule = ScheduleSpec::Periodic { period };
    c
}

#[test]
fn regret_csv_sums_to_summary_for_the_worst_start() {
    let dir = tempfile::tempdir().unwrap();
    let rep = run(&config(3), dir.path()).unwrap();
    let s = rep.summary.unwrap();
    let text = fs::read_to_string(dir.path().join("regret.csv")).unwrap();
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - s.dr_exact).abs() <= 1e-8);
    for p in &s.per_start {
        assert!((p.delta_sum - p.regret).abs() <= 1e-8);
    }
    let cum_bound: f64 = text.lines().last().unwrap().split(',').nth(6).unwrap().parse().unwrap();
    assert!((cum_bound - s.bound_total.unwrap()).abs() <= 1e-8 * cum_bound.max(1.0));
}

#[test]
fn oracle_model_with_full_horizon_is_regret_free() {
    let mut c = config(1);
    c.agent.model = ModelSource::Oracle;
    c.agent.h_bar = c.horizon;
    c.scenario = ScenarioSpec::TwoStateRotating { amplitude: 0.0, angular_rate: 1.0 };
    let s = execute(&c).unwrap().summary.unwrap();
    assert!(s.dr_exact.abs() <= 1e-8);
}

#[test]
fn deterministic_chain_flags_the_mixing_assumption() {
    let mut c = config(2);
    c.scenario = ScenarioSpec::GridworldWind { side: 2, drift_amplitude: 0.0, period: 4 };
    let dir = tempfile::tempdir().unwrap();
    let rep = run(&c, dir.path()).unwrap();
    let s = rep.summary.unwrap();
    assert!(s.assumption_violated);
    assert_eq!(s.eta, 0.0);
    assert!(s.bound_total.is_none());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(json["bound_total"].is_null());
    assert!(!dir.path().join("bound.csv").exists());
}

#[test]
fn bundles_are_reproducible_in_both_formats() {
    for format in [OutputFormat::Csv, OutputFormat::Json] {
        let mut c = config(2);
        c.output_format = format;
        c.eval.mc_rollouts = 500;
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(&c, a.path()).unwrap();
        run(&c, b.path()).unwrap();
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names.iter().filter(|n| *n != "timing.json") {
            assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?}");
        }
    }
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(4);
    let first = run(&c, dir.path()).unwrap().summary.unwrap();
    let echoed = ExperimentConfig::load(&dir.path().join("config.json")).unwrap();
    assert_eq!(echoed, c);
    assert_eq!(execute(&echoed).unwrap().summary.unwrap(), first);
}

#[test]
fn sweep_rows_match_single_runs() {
    let c = config(1);
    let rows = sweep(&c, &[3, 1, 2]).unwrap();
    assert_eq!(rows.iter().map(|r| r.period).collect::<Vec<_>>(), vec![1, 2, 3]);
    for row in &rows {
        let single = execute(&config(row.period)).unwrap().summary.unwrap();
        assert_eq!(row.dr_exact, Some(single.dr_exact));
        assert_eq!(row.bound_total, single.bound_total);
    }
}

#[test]
fn stationary_oracle_agent_is_flat_across_periods() {
    let mut c = config(1);
    c.scenario = ScenarioSpec::RandomDrift { n_states: 3, n_actions: 2, drift: 0.0, seed: 5 };
    c.agent.model = ModelSource::Oracle;
    c.agent.h_bar = c.horizon;
    let rows = sweep(&c, &[1, 2, 4]).unwrap();
    assert!(rows[0].dr_exact.unwrap().abs() <= 1e-8);
    assert!(rows.iter().all(|r| r.dr_exact.unwrap() >= -1e-12));
}
