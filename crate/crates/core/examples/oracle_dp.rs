//! Backward induction on a rotating two-state chain: optimal values, the
//! greedy policy per step, and the span bound `Ṽ`.

use tvmdp::experiment::{generate_scenario, ScenarioSpec};
use tvmdp::oracle::{solve_oracle, span_bounds};

fn main() -> tvmdp::Result<()> {
    let mdp = generate_scenario(&ScenarioSpec::TwoStateRotating { amplitude: 0.4, angular_rate: 0.5 }, 8)?;
    let tables = solve_oracle(&mdp)?;
    println!("t  V*_t(0)   V*_t(1)   greedy");
    for t in 0..mdp.horizon() {
        let v = tables.value(t);
        let greedy: Vec<usize> = (0..2).map(|s| tables.greedy_action(t, s)).collect();
        println!("{t}  {:8.5}  {:8.5}  {greedy:?}", v[0], v[1]);
    }
    println!("J*_T = {:?}", tables.optimal_return());
    println!("Ṽ = {:.5}", span_bounds(&tables));
    Ok(())
}
