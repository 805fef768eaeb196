//! Seeded random instances for the oracle comparisons.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvmdp::model::{ControlledKernel, RewardTable, TvMdp, UpdateSchedule};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random point of the simplex with every coordinate at least `floor / n`.
pub fn random_distribution(rng: &mut impl Rng, n: usize, floor: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| floor + rng.gen::<f64>()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

pub fn random_kernel(rng: &mut impl Rng, n: usize, m: usize, floor: f64) -> ControlledKernel {
    let probs: Vec<f64> = (0..n * m).flat_map(|_| random_distribution(rng, n, floor)).collect();
    ControlledKernel::new(n, m, probs).expect("shape")
}

pub fn random_rewards(rng: &mut impl Rng, n: usize, m: usize) -> RewardTable {
    RewardTable::new(n, m, (0..n * m).map(|_| rng.gen()).collect()).expect("shape")
}

/// Independent random kernels and rewards per step, with the tight drift array.
pub fn random_instance(rng: &mut impl Rng, n: usize, m: usize, horizon: usize) -> TvMdp {
    let kernels = (0..horizon).map(|_| random_kernel(rng, n, m, 0.05)).collect();
    let rewards = (0..horizon).map(|_| random_rewards(rng, n, m)).collect();
    TvMdp::with_tight_drift(kernels, rewards).expect("valid instance")
}

/// Kernels that move from a random start by convex steps of size `step`,
/// with stationary random rewards.
pub fn drifting_instance(rng: &mut impl Rng, n: usize, m: usize, horizon: usize, step: f64) -> TvMdp {
    let mut current = random_kernel(rng, n, m, 0.2);
    let rewards = random_rewards(rng, n, m);
    let mut kernels = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        kernels.push(current.clone());
        let target = random_kernel(rng, n, m, 0.2);
        let probs = current
            .as_slice()
            .iter()
            .zip(target.as_slice())
            .map(|(p, q)| (1.0 - step) * p + step * q)
            .collect();
        current = ControlledKernel::new(n, m, probs).expect("shape");
    }
    TvMdp::with_tight_drift(kernels, vec![rewards; horizon]).expect("valid instance")
}

/// Periodic, explicit or Bernoulli schedule, picked at random.
pub fn random_schedule(rng: &mut impl Rng, horizon: usize) -> UpdateSchedule {
    match rng.gen_range(0..3) {
        0 => UpdateSchedule::periodic(rng.gen_range(1..=3), horizon).expect("valid"),
        1 => {
            let mut rest: Vec<usize> = (1..horizon).collect();
            rest.shuffle(rng);
            let k = rng.gen_range(0..=rest.len().min(3));
            let mut times = vec![0];
            times.extend_from_slice(&rest[..k]);
            times.sort_unstable();
            UpdateSchedule::new(times, horizon).expect("valid")
        }
        _ => {
            let mut times = vec![0];
            times.extend((1..horizon).filter(|_| rng.gen_bool(0.5)));
            UpdateSchedule::new(times, horizon).expect("valid")
        }
    }
}

/// A second instance obtained by mixing every kernel row toward a random row
/// with weight `weight` and jittering rewards by up to `weight / 2`.
pub fn perturbed_copy(rng: &mut impl Rng, mdp: &TvMdp, weight: f64) -> TvMdp {
    let (n, m) = (mdp.n_states(), mdp.n_actions());
    let kernels = mdp
        .kernels()
        .iter()
        .map(|k| {
            let other = random_kernel(rng, n, m, 0.05);
            let probs = k
                .as_slice()
                .iter()
                .zip(other.as_slice())
                .map(|(p, q)| (1.0 - weight) * p + weight * q)
                .collect();
            ControlledKernel::new(n, m, probs).expect("shape")
        })
        .collect();
    let rewards = mdp
        .rewards()
        .iter()
        .map(|r| {
            let values = r.as_slice().iter().map(|x| x + weight * (rng.gen::<f64>() - 0.5)).collect();
            RewardTable::new(n, m, values).expect("shape")
        })
        .collect();
    TvMdp::with_tight_drift(kernels, rewards).expect("valid instance")
}
