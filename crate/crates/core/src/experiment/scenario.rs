use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ScheduleSpec;
use crate::error::{Error, Result};
use crate::model::{ControlledKernel, RewardTable, TvMdp, UpdateSchedule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    /// Two states whose stay-probabilities rotate: `P_t(0 | s, a) = ½ + A cos(ωt + θ_{s,a})`.
    TwoStateRotating { amplitude: f64, angular_rate: f64 },
    /// Random rows moving toward random targets by at most `drift` per step.
    RandomDrift {
        n_states: usize,
        n_actions: usize,
        drift: f64,
        seed: u64,
    },
    /// `side × side` grid, four moves, an eastward wind of periodic strength, reward at the far corner.
    GridworldWind {
        side: usize,
        drift_amplitude: f64,
        period: usize,
    },
}

pub fn generate_scenario(spec: &ScenarioSpec, horizon: usize) -> Result<TvMdp> {
    if horizon == 0 {
        return Err(Error::Config("horizon must be positive".into()));
    }
    let (kernels, rewards) = match *spec {
        ScenarioSpec::TwoStateRotating { amplitude, angular_rate } => rotating(amplitude, angular_rate, horizon)?,
        ScenarioSpec::RandomDrift {
            n_states,
            n_actions,
            drift,
            seed,
        } => random_drift(n_states, n_actions, drift, seed, horizon)?,
        ScenarioSpec::GridworldWind {
            side,
            drift_amplitude,
            period,
        } => gridworld(side, drift_amplitude, period, horizon)?,
    };
    TvMdp::with_tight_drift(kernels, rewards)
}

type Tables = (Vec<ControlledKernel>, Vec<RewardTable>);

fn rotating(amplitude: f64, rate: f64, horizon: usize) -> Result<Tables> {
    if !(0.0..=0.5).contains(&amplitude) || !rate.is_finite() {
        return Err(Error::Config("rotating chain needs amplitude in [0, 0.5] and a finite rate".into()));
    }
    let kernels = (0..horizon)
        .map(|t| {
            ControlledKernel::from_fn(2, 2, |s, a, next| {
                let phase = PI * (2 * s + a) as f64 / 2.0;
                let p0 = (0.5 + amplitude * (rate * t as f64 + phase).cos()).clamp(0.0, 1.0);
                if next == 0 {
                    p0
                } else {
                    1.0 - p0
                }
            })
        })
        .collect();
    let rewards = vec![RewardTable::from_fn(2, 2, |s, _| s as f64); horizon];
    Ok((kernels, rewards))
}

fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.1 + rng.gen::<f64>()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn random_drift(n: usize, m: usize, drift: f64, seed: u64, horizon: usize) -> Result<Tables> {
    if n == 0 || m == 0 {
        return Err(Error::Config("random_drift needs at least one state and action".into()));
    }
    if !(0.0..=1.0).contains(&drift) {
        return Err(Error::Config("random_drift budget must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = (0..n * m).map(|_| random_row(&mut rng, n)).collect();
    let mut targets: Vec<Vec<f64>> = (0..n * m).map(|_| random_row(&mut rng, n)).collect();
    let rewards = RewardTable::from_fn(n, m, |_, _| rng.gen::<f64>());
    let mut kernels = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        kernels.push(ControlledKernel::from_fn(n, m, |s, a, y| rows[s * m + a][y]));
        for (row, target) in rows.iter_mut().zip(targets.iter_mut()) {
            let gap = row.iter().zip(target.iter()).map(|(x, y)| (y - x).abs()).fold(0.0, f64::max);
            if gap <= drift {
                // Reaching the target: stop there and pick the next one.
                row.clone_from(target);
                *target = random_row(&mut rng, n);
            } else {
                let lambda = drift / gap;
                for (x, y) in row.iter_mut().zip(target.iter()) {
                    *x += lambda * (y - *x);
                }
            }
        }
    }
    Ok((kernels, vec![rewards; horizon]))
}

fn gridworld(side: usize, amplitude: f64, period: usize, horizon: usize) -> Result<Tables> {
    if side < 2 || !(0.0..=1.0).contains(&amplitude) || period == 0 {
        return Err(Error::Config("gridworld needs side ≥ 2, amplitude in [0, 1], period ≥ 1".into()));
    }
    let n = side * side;
    let moves: [(i64, i64); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];
    let step = |s: usize, (dr, dc): (i64, i64)| -> usize {
        let (r, c) = ((s / side) as i64, (s % side) as i64);
        let (r2, c2) = (r + dr, c + dc);
        if r2 < 0 || c2 < 0 || r2 >= side as i64 || c2 >= side as i64 {
            s
        } else {
            r2 as usize * side + c2 as usize
        }
    };
    let goal = side - 1;
    let kernels = (0..horizon)
        .map(|t| {
            let wind = amplitude * 0.5 * (1.0 + (2.0 * PI * t as f64 / period as f64).sin());
            let mut probs = vec![0.0; n * 4 * n];
            for s in 0..n {
                for (a, &mv) in moves.iter().enumerate() {
                    let base = (s * 4 + a) * n;
                    probs[base + step(s, mv)] += 1.0 - wind;
                    probs[base + step(s, (0, 1))] += wind;
                }
            }
            ControlledKernel::new(n, 4, probs)
        })
        .collect::<Result<Vec<_>>>()?;
    let rewards = vec![RewardTable::from_fn(n, 4, |s, _| if s == goal { 1.0 } else { 0.0 }); horizon];
    Ok((kernels, rewards))
}

pub fn generate_schedule(spec: &ScheduleSpec, horizon: usize) -> Result<UpdateSchedule> {
    let cfg = |e: Error| Error::Config(e.to_string());
    match spec {
        ScheduleSpec::Periodic { period } => UpdateSchedule::periodic(*period, horizon).map_err(cfg),
        ScheduleSpec::Explicit { times } => UpdateSchedule::new(times.clone(), horizon).map_err(cfg),
        ScheduleSpec::Random { density, seed } => {
            if !(0.0..=1.0).contains(density) {
                return Err(Error::Config("schedule density must lie in [0, 1]".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut times = vec![0];
            times.extend((1..horizon).filter(|_| rng.gen::<f64>() < *density));
            UpdateSchedule::new(times, horizon).map_err(cfg)
        }
    }
}
