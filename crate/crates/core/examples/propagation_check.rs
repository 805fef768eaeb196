//! Value propagation between an instance and a perturbed copy: the span of
//! the optimal-value gap against the multi-step contraction bound. The bound
//! has no term for a mismatch at the starting step itself, so a copy that
//! differs only there breaks it, while later perturbations do not.

use tvmdp::analysis::propagation_check;
use tvmdp::model::{ControlledKernel, RewardTable, TvMdp};

fn instance(shift: f64, at: usize) -> tvmdp::Result<TvMdp> {
    let kernels: Vec<_> = (0..6)
        .map(|t| {
            let p = 0.3 + 0.05 * t as f64 + if t == at { shift } else { 0.0 };
            ControlledKernel::from_fn(2, 2, |s, a, y| {
                let q = if (s + a) % 2 == 0 { p } else { 1.0 - p };
                if y == 0 {
                    q
                } else {
                    1.0 - q
                }
            })
        })
        .collect();
    let rewards = (0..6)
        .map(|t| {
            let bump = if t == at { shift } else { 0.0 };
            RewardTable::from_fn(2, 2, |s, a| s as f64 + 0.1 * a as f64 + if s == 0 && a == 0 { bump } else { 0.0 })
        })
        .collect();
    TvMdp::with_tight_drift(kernels, rewards)
}

fn main() -> tvmdp::Result<()> {
    let base = instance(0.0, usize::MAX)?;
    for at in [0, 1, 3] {
        let other = instance(0.3, at)?;
        for (m, n) in [(1, 1), (1, 3), (2, 4), (1, 6)] {
            let r = propagation_check(&base, &other, m, None, 0, n)?;
            println!(
                "perturbed at t = {at}, m = {m}, N = {n}: lhs {:.5} rhs {:.5} η {:.3} holds {}",
                r.lhs, r.rhs, r.eta, r.holds
            );
        }
    }
    Ok(())
}
