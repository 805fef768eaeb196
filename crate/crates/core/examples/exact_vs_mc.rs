//! Exact evaluation of the executed policies against Monte-Carlo rollouts.

use tvmdp::controller::{exact_evaluate, monte_carlo, run_episode, AgentConfig};
use tvmdp::experiment::{generate_scenario, ScenarioSpec};
use tvmdp::model::UpdateSchedule;

fn main() -> tvmdp::Result<()> {
    let mdp = generate_scenario(&ScenarioSpec::TwoStateRotating { amplitude: 0.45, angular_rate: 0.4 }, 16)?;
    let schedule = UpdateSchedule::periodic(4, 16)?;
    let ep = run_episode(&mdp, &schedule, &AgentConfig::default(), 0, 5)?;
    let exact = exact_evaluate(&mdp, &ep.executed)?;
    for s0 in 0..mdp.n_states() {
        let mc = monte_carlo(&mdp, &ep.executed, s0, 50_000, 100 + s0 as u64)?;
        println!(
            "s0 = {s0}: exact {:.5}, MC {:.5} ± {:.5} ({:+.2} se)",
            exact.values[s0],
            mc.mean,
            mc.stderr,
            (mc.mean - exact.values[s0]) / mc.stderr
        );
    }
    Ok(())
}
