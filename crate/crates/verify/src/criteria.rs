use std::path::Path;
use std::time::Instant;

use rand::Rng;
use tvmdp::analysis::{per_step_regret, propagation_check, regret_bound, update_step_check, BoundBreakdown, RegretDecomposition};
use tvmdp::controller::{effective_policies, exact_evaluate, monte_carlo, run_episode, AgentConfig, Episode, ExactEvaluation, ModelSource};
use tvmdp::estimator::{polytope_coordinate_range, solve_cmle, uncertainty_intervals_at, CmleOptions, Transition, TransitionDataset};
use tvmdp::experiment::{generate_scenario, run, sweep, write_sweep, ExperimentConfig, ScenarioSpec};
use tvmdp::model::{span, TvMdp, UpdateSchedule};
use tvmdp::oracle::{certify_mixing, solve_oracle, span_bounds, MixingCertificate, ValueTables};

use crate::instances::{drifting_instance, perturbed_copy, random_instance, random_schedule, rng};
use crate::oracles::{brute_force_optimal, chain_polytope, grid_cmle_objective};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn timed(id: usize, name: &'static str, budget: f64, f: impl FnOnce() -> (bool, String)) -> CriterionOutcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let seconds = start.elapsed().as_secs_f64();
    let within = seconds <= budget;
    let detail = if within { detail } else { format!("{detail}; exceeded the {budget} s budget") };
    CriterionOutcome {
        id,
        name,
        passed: ok && within,
        detail,
        seconds,
    }
}

/// One learned-agent run with every downstream artifact.
pub struct Evaluated {
    pub mdp: TvMdp,
    pub schedule: UpdateSchedule,
    pub tables: ValueTables,
    pub episode: Episode,
    pub eval: ExactEvaluation,
    pub decomp: RegretDecomposition,
    pub cert: MixingCertificate,
    pub bound: Option<BoundBreakdown>,
    pub beta: f64,
}

pub fn evaluate(mdp: TvMdp, schedule: UpdateSchedule, agent: &AgentConfig, m: usize, seed: u64) -> tvmdp::Result<Evaluated> {
    let tables = solve_oracle(&mdp)?;
    let episode = run_episode(&mdp, &schedule, agent, 0, seed)?;
    let eval = exact_evaluate(&mdp, &episode.executed)?;
    let decomp = per_step_regret(&mdp, &tables, &eval, &episode.executed)?;
    let effective = effective_policies(&eval, &episode.executed)?;
    let cert = certify_mixing(&mdp, &effective, &tables.greedy_policies(), m)?;
    let bound = if cert.holds() {
        Some(regret_bound(&mdp, &schedule, &cert, span_bounds(&tables), &episode.updates, agent.beta)?)
    } else {
        None
    };
    Ok(Evaluated {
        mdp,
        schedule,
        tables,
        episode,
        eval,
        decomp,
        cert,
        bound,
        beta: agent.beta,
    })
}

fn random_agent(r: &mut impl Rng) -> AgentConfig {
    AgentConfig {
        beta: [0.0, 0.1, 0.5][r.gen_range(0..3)],
        h_bar: r.gen_range(1..=4),
        ..AgentConfig::default()
    }
}

/// Backward induction against enumeration of every deterministic Markov policy sequence.
pub fn oracle_dp() -> CriterionOutcome {
    timed(1, "oracle DP matches brute-force enumeration", 10.0, || {
        let mut worst = 0.0f64;
        for seed in 0..50u64 {
            let mut r = rng(seed);
            let (n, m, h) = (r.gen_range(1..=3), r.gen_range(1..=2), r.gen_range(1..=4));
            let mdp = random_instance(&mut r, n, m, h);
            let dp = match solve_oracle(&mdp) {
                Ok(t) => t,
                Err(e) => return (false, format!("seed {seed}: {e}")),
            };
            let bf = brute_force_optimal(&mdp);
            for (a, b) in dp.optimal_return().iter().zip(&bf) {
                worst = worst.max((a - b).abs());
            }
        }
        (worst <= 1e-9, format!("50 instances, max |V*_0 − brute force| = {worst:.2e}"))
    })
}

/// `Σ_t Δ_t(s₀) = V*_0(s₀) − V^alg_0(s₀)` on learned-agent runs.
pub fn telescoping() -> CriterionOutcome {
    timed(2, "per-step regret telescopes to the value gap", 30.0, || {
        let mut worst = 0.0f64;
        for seed in 0..20u64 {
            let mut r = rng(1000 + seed);
            let (n, m, h) = (r.gen_range(1..=4), r.gen_range(1..=3), r.gen_range(2..=10));
            let mdp = if r.gen_bool(0.5) {
                random_instance(&mut r, n, m, h)
            } else {
                drifting_instance(&mut r, n, m, h, 0.1)
            };
            let schedule = random_schedule(&mut r, h);
            let agent = random_agent(&mut r);
            let run = evaluate(mdp, schedule, &agent, 1, seed);
            match run {
                Ok(ev) => {
                    for x in ev.decomp.telescoping_residual() {
                        worst = worst.max(x.abs());
                    }
                }
                Err(e) => return (false, format!("seed {seed}: {e}")),
            }
        }
        (worst <= 1e-8, format!("20 instances, max residual = {worst:.2e}"))
    })
}

fn mc_scenarios() -> Vec<(&'static str, TvMdp, UpdateSchedule, AgentConfig)> {
    let mut out = Vec::new();
    let rot = generate_scenario(&ScenarioSpec::TwoStateRotating { amplitude: 0.4, angular_rate: 0.6 }, 12).expect("valid");
    out.push(("rotating, period 3", rot, UpdateSchedule::periodic(3, 12).expect("valid"), AgentConfig::default()));
    let rd = generate_scenario(
        &ScenarioSpec::RandomDrift { n_states: 3, n_actions: 2, drift: 0.05, seed: 3 },
        16,
    )
    .expect("valid");
    out.push(("random drift, every step", rd, UpdateSchedule::every_step(16).expect("valid"), AgentConfig::default()));
    let grid = generate_scenario(
        &ScenarioSpec::GridworldWind { side: 3, drift_amplitude: 0.4, period: 6 },
        12,
    )
    .expect("valid");
    out.push(("windy grid, period 4", grid, UpdateSchedule::periodic(4, 12).expect("valid"), AgentConfig::default()));
    let mut r = rng(77);
    let inst = random_instance(&mut r, 4, 2, 10);
    let sched = UpdateSchedule::new(vec![0, 1, 4, 5, 9], 10).expect("valid");
    out.push(("random instance, explicit times", inst, sched, AgentConfig { beta: 0.5, ..AgentConfig::default() }));
    let inst = drifting_instance(&mut r, 3, 3, 14, 0.1);
    out.push((
        "drifting instance, oracle model",
        inst,
        UpdateSchedule::periodic(2, 14).expect("valid"),
        AgentConfig { model: ModelSource::Oracle, ..AgentConfig::default() },
    ));
    out
}

/// Monte-Carlo rollouts of the recorded policies agree with the exact evaluator.
pub fn exact_vs_monte_carlo() -> CriterionOutcome {
    timed(3, "exact evaluation agrees with 1e5 rollouts", 60.0, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, (name, mdp, schedule, agent)) in mc_scenarios().into_iter().enumerate() {
            let res = run_episode(&mdp, &schedule, &agent, 0, 10 + i as u64).and_then(|ep| {
                let exact = exact_evaluate(&mdp, &ep.executed)?;
                let mc = monte_carlo(&mdp, &ep.executed, 0, 100_000, 500 + i as u64)?;
                Ok((exact.values[0], mc))
            });
            match res {
                Ok((exact, mc)) => {
                    let z = (mc.mean - exact).abs() / mc.stderr.max(1e-300);
                    let pass = (mc.mean - exact).abs() <= 3.0 * mc.stderr + 1e-12;
                    ok &= pass;
                    parts.push(format!("{name}: {z:.2} se"));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("{name}: {e}"));
                }
            }
        }
        (ok, parts.join("; "))
    })
}

/// Draws learned-agent runs until `count` of them certify `η > 0`.
fn certified_runs(count: usize, salt: u64) -> Result<Vec<Evaluated>, String> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        if seed > 50 * count as u64 {
            return Err(format!("only {} of {count} draws certified η > 0", out.len()));
        }
        let mut r = rng(salt + seed);
        let (n, m, h) = (r.gen_range(2..=4), r.gen_range(1..=3), r.gen_range(3..=10));
        let step = r.gen_range(0.0..0.2);
        let mdp = if r.gen_bool(0.5) {
            random_instance(&mut r, n, m, h)
        } else {
            drifting_instance(&mut r, n, m, h, step)
        };
        let schedule = random_schedule(&mut r, h);
        let agent = random_agent(&mut r);
        let block = 1 + (out.len() % 2);
        let ev = evaluate(mdp, schedule, &agent, block, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        if ev.cert.holds() {
            out.push(ev);
        }
        seed += 1;
    }
    Ok(out)
}

/// Exact dynamic regret never exceeds the assembled bound.
pub fn bound_dominance() -> CriterionOutcome {
    timed(4, "dynamic regret is below the regret bound", 120.0, || {
        let runs = match certified_runs(30, 20_000) {
            Ok(r) => r,
            Err(e) => return (false, e),
        };
        let mut violations = 0;
        let mut min_slack = f64::INFINITY;
        for ev in &runs {
            let dr = ev.tables.optimal_return().iter().zip(&ev.eval.values).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
            let total = ev.bound.as_ref().expect("certified").total;
            min_slack = min_slack.min(total - dr);
            if dr > total + 1e-8 {
                violations += 1;
            }
        }
        (
            violations == 0,
            format!("30 certified runs (m = 1, 2), {violations} violations, min slack {min_slack:.3e}"),
        )
    })
}

/// The per-update inequality on learned runs and the multi-stage propagation
/// inequality on perturbed pairs.
pub fn supporting_inequalities() -> CriterionOutcome {
    timed(5, "per-update and propagation inequalities hold", 120.0, || {
        let runs = match certified_runs(30, 40_000) {
            Ok(r) => r,
            Err(e) => return (false, e),
        };
        let (mut rows, mut bad_rows) = (0, 0);
        for ev in &runs {
            for row in update_step_check(&ev.decomp, ev.bound.as_ref().expect("certified"), 1e-8) {
                rows += 1;
                bad_rows += usize::from(!row.holds);
            }
        }
        let (mut bad_pairs, mut worst_excess, mut with_first_step) = (0, 0.0f64, 0);
        for trial in 0..30u64 {
            let mut r = rng(60_000 + trial);
            let (n, m, h) = (r.gen_range(2..=3), r.gen_range(1..=2), r.gen_range(3..=7));
            let first = random_instance(&mut r, n, m, h);
            let weight = r.gen_range(0.0..0.3);
            let second = perturbed_copy(&mut r, &first, weight);
            let block = r.gen_range(1..=2);
            let t = r.gen_range(0..h);
            let len = r.gen_range(1..=h - t);
            let rep = match propagation_check(&first, &second, block, None, t, len) {
                Ok(x) => x,
                Err(e) => return (false, format!("trial {trial}: {e}")),
            };
            if !rep.holds {
                bad_pairs += 1;
                worst_excess = worst_excess.max(rep.lhs - rep.rhs);
                // Diagnostic: the same right-hand side plus the step-t mismatch term.
                let vb = solve_oracle(&second).expect("valid");
                let extra = 2.0 * (rep.eps_bar[0] * span(vb.value(t + 1)).expect("nonempty") + rep.delta_bar[0]);
                with_first_step += usize::from(rep.lhs <= rep.rhs + extra + 1e-8);
            }
        }
        (
            bad_rows == 0 && bad_pairs == 0,
            format!(
                "per-update: {bad_rows}/{rows} rows violated; propagation: {bad_pairs}/30 pairs violated \
                 (max excess {worst_excess:.3e}; {with_first_step} of them hold once the step-t mismatch term is added)"
            ),
        )
    })
}

fn dataset(n: usize, m: usize, triples: &[(usize, usize, usize, usize)]) -> TransitionDataset {
    let tr = triples
        .iter()
        .map(|&(time, state, action, next)| Transition { time, state, action, next })
        .collect();
    TransitionDataset::from_triples(n, m, tr).expect("valid data")
}

/// Two-state CMLE against grid search, the constraint residuals, and the worked example.
pub fn cmle_optimality() -> CriterionOutcome {
    timed(6, "CMLE matches grid search and satisfies its constraints", 60.0, || {
        let opts = CmleOptions::default();
        let (mut coarse_gap, mut fine_gap, mut worst_violation) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
        for seed in 0..20u64 {
            let mut r = rng(80_000 + seed);
            let m = r.gen_range(1..=2);
            let k = r.gen_range(1..=3);
            let horizon = 8;
            let mut times: Vec<usize> = (0..horizon).collect();
            rand::seq::SliceRandom::shuffle(&mut times[..], &mut r);
            let mut times = times[..k].to_vec();
            times.sort_unstable();
            let triples: Vec<_> = times
                .iter()
                .map(|&t| (t, r.gen_range(0..2), r.gen_range(0..m), r.gen_range(0..2)))
                .collect();
            let data = dataset(2, m, &triples);
            let drift: Vec<f64> = (0..horizon).map(|_| r.gen_range(0..=15) as f64 * 0.01).collect();
            let est = match solve_cmle(&data, &drift, &opts) {
                Ok(e) => e,
                Err(e) => return (false, format!("seed {seed}: {e}")),
            };
            let obj = est.log_likelihood(&data);
            let coarse = grid_cmle_objective(&data, &drift, 1_000);
            let fine = grid_cmle_objective(&data, &drift, 1_000_000);
            coarse_gap = coarse_gap.max(coarse - obj);
            fine_gap = fine_gap.max((fine - obj).abs());
            let rows = est.kernels.iter().flat_map(|k| {
                (0..2).flat_map(move |s| (0..m).map(move |a| (k, s, a)))
            });
            let mut simplex = 0.0f64;
            for (kern, s, a) in rows {
                let row = kern.row(s, a);
                simplex = simplex.max((row.iter().sum::<f64>() - 1.0).abs());
                simplex = simplex.max(row.iter().map(|p| (-p).max(0.0)).fold(0.0, f64::max));
            }
            worst_violation = worst_violation.max(est.max_violation(&drift)).max(simplex);
        }
        let data = dataset(2, 1, &[(0, 0, 0, 0), (1, 0, 0, 1)]);
        let est = solve_cmle(&data, &[0.2, 0.0], &opts);
        let (p0, p1) = match &est {
            Ok(e) => (e.kernels[0].prob(0, 0, 0), e.kernels[1].prob(0, 0, 1)),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let worked = (p0 - 0.6).abs() <= 1e-4 && (p1 - 0.6).abs() <= 1e-4;
        (
            coarse_gap <= 1e-6 && fine_gap <= 1e-6 && worst_violation <= 1e-8 && worked,
            format!(
                "20 chains: grid(1e-3) − solver ≤ {coarse_gap:.2e}, |grid(1e-6) − solver| ≤ {fine_gap:.2e}, \
                 max constraint violation {worst_violation:.2e}; worked example ({p0:.6}, {p1:.6})"
            ),
        )
    })
}

/// LP coordinate ranges against vertex enumeration of the full chain polytope.
pub fn polytope_ranges() -> CriterionOutcome {
    timed(7, "coordinate ranges match vertex enumeration", 30.0, || {
        let opts = CmleOptions::default();
        let mut worst = 0.0f64;
        let mut checked = 0;
        for seed in 0..20u64 {
            let mut r = rng(90_000 + seed);
            // (states, data times, query offset): at most four coordinates in total.
            let (n, times, offset) = match seed % 4 {
                0 => (2, vec![0, r.gen_range(1..4)], 0),
                1 => (2, vec![r.gen_range(0..3)], r.gen_range(1..3)),
                2 => (4, vec![r.gen_range(0..3)], 0),
                _ => (3, vec![0], 0),
            };
            let m = r.gen_range(1..=2);
            let triples: Vec<_> = times
                .iter()
                .map(|&t| (t, r.gen_range(0..n.min(2)), r.gen_range(0..m), r.gen_range(0..n)))
                .collect();
            let data = dataset(n, m, &triples);
            let drift: Vec<f64> = (0..8).map(|_| r.gen_range(0.0..0.3)).collect();
            let est = match solve_cmle(&data, &drift, &opts) {
                Ok(e) => e,
                Err(e) => return (false, format!("seed {seed}: {e}")),
            };
            let last = *times.last().expect("nonempty");
            let query = last + offset;
            let iv = match uncertainty_intervals_at(&data, &drift, &est, query) {
                Ok(iv) => iv,
                Err(e) => return (false, format!("seed {seed}: {e}")),
            };
            let (s, a) = (triples[0].1, triples[0].2);
            let (poly, node) = chain_polytope(&data, &drift, &est, s, a, query);
            for y in 0..n {
                let Some((lo, hi)) = poly.coordinate_range(node * n + y) else {
                    return (false, format!("seed {seed}: oracle polytope is empty"));
                };
                let (l, h) = iv.interval(s, a, y);
                worst = worst.max((l - lo).abs()).max((h - hi).abs());
                if offset == 0 {
                    let (l2, h2) = polytope_coordinate_range(&data, &drift, &est, s, a, y).expect("valid");
                    worst = worst.max((l2 - lo).abs()).max((h2 - hi).abs());
                }
                checked += 1;
            }
        }
        (worst <= 1e-8, format!("20 polytopes, {checked} coordinates, max deviation {worst:.2e}"))
    })
}

/// Sweeping the update period on the default drifting scenario.
pub fn skip_trend(out: &Path) -> CriterionOutcome {
    timed(8, "regret and bound grow with the update period", 60.0, || {
        let config = ExperimentConfig::default_drifting();
        let rows = match sweep(&config, &[1, 2, 4, 8]) {
            Ok(r) => r,
            Err(e) => return (false, e.to_string()),
        };
        if let Err(e) = write_sweep(out, &config, &rows) {
            return (false, e.to_string());
        }
        let dr: Vec<f64> = rows.iter().map(|r| r.dr_exact.unwrap_or(f64::NAN)).collect();
        let bound: Vec<f64> = rows.iter().map(|r| r.bound_total.unwrap_or(f64::NAN)).collect();
        let dr_ok = dr[3] >= dr[0];
        let bound_ok = bound.windows(2).all(|w| w[1] >= w[0]);
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
        (
            dr_ok && bound_ok,
            format!(
                "DR = [{}] ({}), bound = [{}] ({}); sweep.csv written",
                fmt(&dr),
                if dr_ok { "DR(8) ≥ DR(1)" } else { "DR(8) < DR(1)" },
                fmt(&bound),
                if bound_ok { "nondecreasing" } else { "not monotone" }
            ),
        )
    })
}

fn bundle_files(dir: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        // Wall-clock timings are the one artifact allowed to differ.
        if name != "timing.json" {
            files.push((name, std::fs::read(entry.path())?));
        }
    }
    files.sort();
    Ok(files)
}

/// Two runs of the same config produce byte-identical bundles.
pub fn determinism() -> CriterionOutcome {
    timed(9, "identical configs give byte-identical bundles", 60.0, || {
        let mut config = ExperimentConfig::default_drifting();
        config.schedule = tvmdp::experiment::ScheduleSpec::Periodic { period: 3 };
        config.eval.mc_rollouts = 2_000;
        let mut parts = Vec::new();
        let mut ok = true;
        for format in [tvmdp::experiment::OutputFormat::Csv, tvmdp::experiment::OutputFormat::Json] {
            config.output_format = format;
            let dirs = (tempfile::tempdir(), tempfile::tempdir());
            let (Ok(a), Ok(b)) = dirs else {
                return (false, "could not create temporary directories".into());
            };
            if let Err(e) = run(&config, a.path()).and_then(|_| run(&config, b.path())) {
                return (false, e.to_string());
            }
            match (bundle_files(a.path()), bundle_files(b.path())) {
                (Ok(x), Ok(y)) => {
                    ok &= x == y && !x.is_empty();
                    parts.push(format!("{format:?}: {} files {}", x.len(), if x == y { "identical" } else { "differ" }));
                }
                _ => return (false, "could not read bundles".into()),
            }
        }
        (ok, parts.join("; ") + " (timing.json excluded)")
    })
}

/// Runs criteria 1 to 9, then reports the total runtime as criterion 10.
/// `sweep.csv` from criterion 8 goes into `out`.
pub fn run_all(out: &Path) -> Vec<CriterionOutcome> {
    let start = Instant::now();
    let mut results = vec![
        oracle_dp(),
        telescoping(),
        exact_vs_monte_carlo(),
        bound_dominance(),
        supporting_inequalities(),
        cmle_optimality(),
        polytope_ranges(),
        skip_trend(out),
        determinism(),
    ];
    let total = start.elapsed().as_secs_f64();
    results.push(CriterionOutcome {
        id: 10,
        name: "whole suite runs within five minutes",
        passed: total <= 300.0,
        detail: format!("criteria 1-9 took {total:.1} s"),
        seconds: total,
    });
    results
}
