//! Coordinate ranges of the solution polytope at the latest update, and how
//! the forecast widens them over the next few steps.

use tvmdp::estimator::{
    forecast_uncertainty, solve_cmle, uncertainty_intervals, CmleOptions, Transition, TransitionDataset,
};

fn main() -> tvmdp::Result<()> {
    let obs = [(0, 0, 0, 1), (1, 1, 1, 2), (2, 0, 0, 2), (4, 0, 1, 0)];
    let triples = obs
        .iter()
        .map(|&(time, state, action, next)| Transition { time, state, action, next })
        .collect();
    let data = TransitionDataset::from_triples(3, 2, triples)?;
    let drift = vec![0.05; 10];
    let est = solve_cmle(&data, &drift, &CmleOptions::default())?;
    let iv = uncertainty_intervals(&data, &drift, &est)?;
    for s in 0..3 {
        for a in 0..2 {
            let ranges: Vec<String> = (0..3)
                .map(|y| {
                    let (lo, hi) = iv.interval(s, a, y);
                    format!("[{lo:.3}, {hi:.3}]")
                })
                .collect();
            println!("({s},{a}) u = {:.3}  {}", iv.diameter(s, a), ranges.join(" "));
        }
    }
    for h in 0..4 {
        let f = forecast_uncertainty(&iv, &drift, h)?;
        println!("h = {h}: u(0,0) = {:.3}, max u = {:.3}", f.diameter(0, 0), f.max_diameter());
    }
    Ok(())
}
