//! The three scenario generators, their tight drift arrays, and the validator.

use tvmdp::experiment::{generate_scenario, generate_schedule, ScenarioSpec, ScheduleSpec};
use tvmdp::model::validate_instance;

fn main() -> tvmdp::Result<()> {
    let specs = [
        ScenarioSpec::TwoStateRotating { amplitude: 0.3, angular_rate: 0.8 },
        ScenarioSpec::RandomDrift { n_states: 4, n_actions: 2, drift: 0.04, seed: 11 },
        ScenarioSpec::GridworldWind { side: 4, drift_amplitude: 0.5, period: 10 },
    ];
    for spec in &specs {
        let mdp = generate_scenario(spec, 20)?;
        let drift = mdp.drift();
        println!(
            "{spec:?}\n  |S| = {}, |A| = {}, valid = {}, max ε_t = {:.4}, Σ ε_t = {:.4}",
            mdp.n_states(),
            mdp.n_actions(),
            validate_instance(&mdp).is_valid(),
            drift.iter().copied().fold(0.0, f64::max),
            drift.iter().sum::<f64>()
        );
    }
    let random = generate_schedule(&ScheduleSpec::Random { density: 0.3, seed: 4 }, 20)?;
    println!("random schedule: {:?}", random.times());
    Ok(())
}
