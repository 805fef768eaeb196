//! A single seeded episode with updates every third step.

use tvmdp::controller::{run_episode, AgentConfig};
use tvmdp::experiment::{generate_scenario, ScenarioSpec};
use tvmdp::model::UpdateSchedule;

fn main() -> tvmdp::Result<()> {
    let mdp = generate_scenario(
        &ScenarioSpec::RandomDrift { n_states: 3, n_actions: 2, drift: 0.05, seed: 7 },
        12,
    )?;
    let schedule = UpdateSchedule::periodic(3, 12)?;
    let ep = run_episode(&mdp, &schedule, &AgentConfig::default(), 0, 42)?;
    println!(" t  upd  s  input  a  reward");
    for (step, r) in ep.trajectory.steps.iter().zip(&ep.trajectory.rewards) {
        println!(
            "{:2}  {}    {}  {}      {}  {r:.3}",
            step.t,
            if step.is_update { "*" } else { " " },
            step.state,
            step.input,
            step.action
        );
    }
    for u in &ep.updates {
        println!("update τ = {:2}: {} transitions, H = {}, max u = {:.3}", u.time, u.data_len, u.plan.horizon, u.intervals.max_diameter());
    }
    println!("total reward {:.4}", ep.trajectory.total_reward());
    Ok(())
}
