//! Overlap coefficient between the executed and optimal policies for a few
//! block lengths, and a chain where it vanishes.

use tvmdp::controller::{effective_policies, exact_evaluate, run_episode, AgentConfig};
use tvmdp::experiment::{generate_scenario, ScenarioSpec};
use tvmdp::model::{ControlledKernel, MarkovPolicy, RewardTable, TvMdp, UpdateSchedule};
use tvmdp::oracle::{certify_mixing, solve_oracle};

fn main() -> tvmdp::Result<()> {
    let mdp = generate_scenario(
        &ScenarioSpec::RandomDrift { n_states: 3, n_actions: 2, drift: 0.05, seed: 2 },
        10,
    )?;
    let tables = solve_oracle(&mdp)?;
    let ep = run_episode(&mdp, &UpdateSchedule::periodic(2, 10)?, &AgentConfig::default(), 0, 1)?;
    let eval = exact_evaluate(&mdp, &ep.executed)?;
    let effective = effective_policies(&eval, &ep.executed)?;
    for m in 1..=3 {
        let cert = certify_mixing(&mdp, &effective, &tables.greedy_policies(), m)?;
        println!("m = {m}: η = {:.4}, α = {:.4}", cert.eta, cert.alpha);
    }

    // Two absorbing states: nothing mixes, so η = 0.
    let stay = ControlledKernel::from_fn(2, 1, |s, _, y| if s == y { 1.0 } else { 0.0 });
    let frozen = TvMdp::with_tight_drift(vec![stay; 4], vec![RewardTable::zeros(2, 1); 4])?;
    let pi = vec![MarkovPolicy::constant(2, 1, 0); 4];
    let cert = certify_mixing(&frozen, &pi, &pi, 2)?;
    println!("absorbing chain: η = {}, certificate holds: {}", cert.eta, cert.holds());
    Ok(())
}
