//! Drift-constrained maximum likelihood on a handful of transitions.

use tvmdp::estimator::{solve_cmle, CmleOptions, Transition, TransitionDataset};

fn main() -> tvmdp::Result<()> {
    let obs = [(0, 0, 0, 0), (1, 0, 0, 1), (3, 0, 0, 1), (4, 1, 0, 1), (5, 0, 0, 0)];
    let triples = obs
        .iter()
        .map(|&(time, state, action, next)| Transition { time, state, action, next })
        .collect();
    let data = TransitionDataset::from_triples(2, 1, triples)?;
    let drift = [0.2, 0.1, 0.1, 0.05, 0.05, 0.05];
    let est = solve_cmle(&data, &drift, &CmleOptions::default())?;
    for (t, k) in est.times.iter().zip(&est.kernels) {
        println!("τ = {t}: P̂(0|0) = {:.6}, P̂(0|1) = {:.6}", k.prob(0, 0, 0), k.prob(1, 0, 0));
    }
    println!(
        "log-likelihood {:.6}, drift violation {:.1e}, {} iterations, gap {:.1e}",
        est.log_likelihood(&data),
        est.max_violation(&drift),
        est.diagnostics.iterations,
        est.diagnostics.duality_gap
    );
    Ok(())
}
