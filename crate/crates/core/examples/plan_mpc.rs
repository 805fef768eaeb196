//! One receding-horizon planning call: a frozen kernel, rewards with an
//! uncertainty bonus, and the first-step policy that gets executed.

use tvmdp::estimator::UncertaintyIntervals;
use tvmdp::experiment::{generate_scenario, ScenarioSpec};
use tvmdp::planner::{build_augmented_rewards, first_policy, plan, planning_horizon, HorizonRule};

fn main() -> tvmdp::Result<()> {
    let mdp = generate_scenario(&ScenarioSpec::GridworldWind { side: 3, drift_amplitude: 0.3, period: 8 }, 12)?;
    let (t, beta) = (2, 0.2);
    let h = planning_horizon(HorizonRule::ToEnd, 6, mdp.horizon(), t);
    let (n, m) = (mdp.n_states(), mdp.n_actions());
    // No data yet: every pair is fully uncertain, so the bonus is flat.
    let forecasts: Vec<_> = (0..h).map(|k| UncertaintyIntervals::full(t + k, n, m)).collect();
    let rewards = build_augmented_rewards(&mdp, &forecasts, t, h, beta)?;
    let art = plan(t, mdp.kernel(t), rewards)?;
    let pi = first_policy(&art);
    let names = ["N", "E", "S", "W"];
    for row in 0..3 {
        let cells: Vec<&str> = (0..3).map(|c| names[pi.mode(row * 3 + c)]).collect();
        println!("{}", cells.join(" "));
    }
    println!("H = {h}, W̃ = {:.4}, Ŵ_0 = {:?}", art.w_span, art.w[0].iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>());
    Ok(())
}
