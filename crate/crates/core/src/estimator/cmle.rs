//! Log-barrier interior-point solver for the drift-constrained likelihood.
//!
//! Per pair, the variables are the group distributions `x_g ∈ Δ^S`. The
//! Hessian of the barrier separates by next-state coordinate into tridiagonal
//! blocks along the chain, so each Newton step only needs `S` tridiagonal
//! factorisations and one `G × G` Schur system for the simplex multipliers.

use serde::{Deserialize, Serialize};

use super::{check_drift, pair_chain, ChainEstimate, PairChain, SolverDiagnostics, TransitionDataset, MERGE_TOL};
use crate::error::{Error, Result};
use crate::model::ControlledKernel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CmleInit {
    Uniform,
    /// `(1 − weight) · uniform + weight · kernel`, applied to every group.
    Blend { weight: f64, kernel: ControlledKernel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmleOptions {
    /// Target duality gap on the log-likelihood.
    pub tol: f64,
    /// Cap on Newton steps per pair.
    pub max_iters: usize,
    pub init: CmleInit,
}

impl Default for CmleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 50_000,
            init: CmleInit::Uniform,
        }
    }
}

const BARRIER_GROWTH: f64 = 20.0;
const CENTERING_TOL: f64 = 1e-11;
const ARMIJO: f64 = 0.25;
const STALL_TOL: f64 = 1e-15;

pub fn solve_cmle(data: &TransitionDataset, drift: &[f64], opts: &CmleOptions) -> Result<ChainEstimate> {
    if data.is_empty() {
        return Err(Error::invalid("CMLE needs at least one transition"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("CMLE tolerance must be positive"));
    }
    check_drift(data, drift)?;
    let (n, m) = (data.n_states(), data.n_actions());
    let times = data.times();
    let mut probs = vec![vec![0.0; n * m * n]; times.len()];
    let mut diagnostics = SolverDiagnostics::default();
    let mut converged = true;
    for s in 0..n {
        for a in 0..m {
            let offset = (s * m + a) * n;
            let Some(chain) = pair_chain(data, drift, s, a) else {
                for p in probs.iter_mut() {
                    p[offset..offset + n].fill(1.0 / n as f64);
                }
                continue;
            };
            let start = init_row(&opts.init, n, s, a)?;
            let sol = solve_pair(&chain, &start, opts.tol, opts.max_iters);
            diagnostics.iterations += sol.iterations;
            diagnostics.duality_gap = diagnostics.duality_gap.max(sol.gap);
            diagnostics.kkt_residual = diagnostics.kkt_residual.max(sol.decrement);
            converged &= sol.converged;
            for (k, &time) in times.iter().enumerate() {
                let row = reconstruct(&chain, &sol.x, drift, time);
                probs[k][offset..offset + n].copy_from_slice(&row);
            }
        }
    }
    let kernels = probs
        .into_iter()
        .map(|p| ControlledKernel::new(n, m, p))
        .collect::<Result<Vec<_>>>()?;
    let estimate = ChainEstimate {
        times,
        kernels,
        diagnostics,
    };
    if converged {
        Ok(estimate)
    } else {
        Err(Error::Convergence {
            iterations: estimate.diagnostics.iterations,
            gap: estimate.diagnostics.duality_gap,
            best: Box::new(estimate),
        })
    }
}

fn init_row(init: &CmleInit, n: usize, s: usize, a: usize) -> Result<Vec<f64>> {
    let uniform = 1.0 / n as f64;
    match init {
        CmleInit::Uniform => Ok(vec![uniform; n]),
        CmleInit::Blend { weight, kernel } => {
            if kernel.n_states() != n || a >= kernel.n_actions() {
                return Err(Error::invalid("initial kernel dimensions disagree with the data"));
            }
            let row: Vec<f64> = kernel
                .row(s, a)
                .iter()
                .map(|p| (1.0 - weight) * uniform + weight * p)
                .collect();
            if !(0.0..=1.0).contains(weight) || row.iter().any(|&p| p <= 0.0) {
                return Err(Error::invalid("initial point must be strictly inside the simplex"));
            }
            Ok(row)
        }
    }
}

/// Row at an arbitrary update time from the group optima.
fn reconstruct(chain: &PairChain, x: &[Vec<f64>], drift: &[f64], time: usize) -> Vec<f64> {
    let occ = &chain.occ_times;
    let pos = occ.partition_point(|&t| t <= time);
    if pos == 0 {
        return x[chain.occ_group[0]].clone();
    }
    if pos == occ.len() {
        return x[chain.occ_group[pos - 1]].clone();
    }
    let (lo, hi) = (chain.occ_group[pos - 1], chain.occ_group[pos]);
    let (t0, t1) = (occ[pos - 1], occ[pos]);
    let total: f64 = drift[t0..t1].iter().sum();
    if lo == hi || total <= MERGE_TOL {
        return x[lo].clone();
    }
    let frac = drift[t0..time].iter().sum::<f64>() / total;
    x[lo].iter().zip(&x[hi]).map(|(p, q)| p + frac * (q - p)).collect()
}

struct PairSolution {
    x: Vec<Vec<f64>>,
    iterations: usize,
    gap: f64,
    decrement: f64,
    converged: bool,
}

struct Derivatives {
    grad: Vec<Vec<f64>>,
    diag: Vec<Vec<f64>>,
    /// `off[g][y]` couples groups `g − 1` and `g`.
    off: Vec<Vec<f64>>,
}

fn solve_pair(chain: &PairChain, start: &[f64], tol: f64, max_iters: usize) -> PairSolution {
    let (groups, n) = (chain.groups(), start.len());
    let mut x = vec![start.to_vec(); groups];
    let n_ineq = (n * groups + 2 * n * (groups - 1)) as f64;
    let mut tb = 1.0;
    let mut iterations = 0;
    loop {
        let mut decrement = 0.0;
        loop {
            if iterations >= max_iters {
                return PairSolution {
                    x,
                    iterations,
                    gap: n_ineq / tb,
                    decrement,
                    converged: false,
                };
            }
            let d = derivatives(chain, &x, tb);
            let (dx, lambda2) = newton_direction(&d, &x);
            decrement = (lambda2.max(0.0)).sqrt() / tb;
            if lambda2 / 2.0 <= CENTERING_TOL {
                break;
            }
            iterations += 1;
            // Stop centering once the barrier value stalls at float resolution.
            match line_search(chain, &mut x, &dx, &d.grad, tb) {
                Some((f0, f)) if f0 - f > STALL_TOL * (1.0 + f0.abs()) => {}
                _ => break,
            }
        }
        let gap = n_ineq / tb;
        if gap <= tol {
            return PairSolution {
                x,
                iterations,
                gap,
                decrement,
                converged: true,
            };
        }
        tb *= BARRIER_GROWTH;
    }
}

fn barrier(chain: &PairChain, x: &[Vec<f64>], tb: f64) -> f64 {
    let mut f = 0.0;
    for (g, row) in x.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p <= 0.0 {
                return f64::INFINITY;
            }
            f -= (tb * chain.counts[g][y] + 1.0) * p.ln();
            if g > 0 {
                let b = chain.budgets[g];
                let d = p - x[g - 1][y];
                if d >= b || d <= -b {
                    return f64::INFINITY;
                }
                f -= (b - d).ln() + (b + d).ln();
            }
        }
    }
    f
}

fn derivatives(chain: &PairChain, x: &[Vec<f64>], tb: f64) -> Derivatives {
    let (groups, n) = (x.len(), x[0].len());
    let mut grad = vec![vec![0.0; n]; groups];
    let mut diag = vec![vec![0.0; n]; groups];
    let mut off = vec![vec![0.0; n]; groups];
    for g in 0..groups {
        for y in 0..n {
            let w = tb * chain.counts[g][y] + 1.0;
            let p = x[g][y];
            grad[g][y] -= w / p;
            diag[g][y] += w / (p * p);
            if g > 0 {
                let b = chain.budgets[g];
                let d = p - x[g - 1][y];
                let (u, v) = (b - d, b + d);
                let d1 = 1.0 / u - 1.0 / v;
                let d2 = 1.0 / (u * u) + 1.0 / (v * v);
                grad[g][y] += d1;
                grad[g - 1][y] -= d1;
                diag[g][y] += d2;
                diag[g - 1][y] += d2;
                off[g][y] = -d2;
            }
        }
    }
    Derivatives { grad, diag, off }
}

/// LDLᵀ factor of a symmetric positive-definite tridiagonal matrix.
struct Tridiag {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl Tridiag {
    fn factor(diag: &[f64], off: &[f64]) -> Self {
        let n = diag.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n];
        d[0] = diag[0];
        for g in 1..n {
            l[g] = off[g] / d[g - 1];
            d[g] = diag[g] - l[g] * off[g];
        }
        Self { d, l }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut z = b.to_vec();
        for g in 1..n {
            z[g] -= self.l[g] * z[g - 1];
        }
        for g in 0..n {
            z[g] /= self.d[g];
        }
        for g in (0..n - 1).rev() {
            z[g] -= self.l[g + 1] * z[g + 1];
        }
        z
    }
}

/// Newton step for the equality-constrained barrier problem, with its
/// squared decrement `dxᵀ H dx`.
fn newton_direction(d: &Derivatives, x: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
    let (groups, n) = (x.len(), x[0].len());
    let mut schur = vec![vec![0.0; groups]; groups];
    let mut rhs: Vec<f64> = x.iter().map(|row| row.iter().sum::<f64>() - 1.0).collect();
    let mut factors = Vec::with_capacity(n);
    let mut free = Vec::with_capacity(n);
    for y in 0..n {
        let diag: Vec<f64> = (0..groups).map(|g| d.diag[g][y]).collect();
        let off: Vec<f64> = (0..groups).map(|g| d.off[g][y]).collect();
        let f = Tridiag::factor(&diag, &off);
        let neg_grad: Vec<f64> = (0..groups).map(|g| -d.grad[g][y]).collect();
        let a = f.solve(&neg_grad);
        for g in 0..groups {
            rhs[g] += a[g];
        }
        let mut e = vec![0.0; groups];
        for col in 0..groups {
            e.fill(0.0);
            e[col] = 1.0;
            let c = f.solve(&e);
            for row in 0..groups {
                schur[row][col] += c[row];
            }
        }
        factors.push(f);
        free.push(a);
    }
    let nu = solve_dense(schur, rhs);
    let mut dx = vec![vec![0.0; n]; groups];
    let mut lambda2 = 0.0;
    for y in 0..n {
        let corr = factors[y].solve(&nu);
        let step: Vec<f64> = (0..groups).map(|g| free[y][g] - corr[g]).collect();
        for g in 0..groups {
            dx[g][y] = step[g];
            let mut hv = d.diag[g][y] * step[g];
            if g > 0 {
                hv += d.off[g][y] * step[g - 1];
            }
            if g + 1 < groups {
                hv += d.off[g + 1][y] * step[g + 1];
            }
            lambda2 += step[g] * hv;
        }
    }
    (dx, lambda2)
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        if p == 0.0 {
            continue;
        }
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = if a[row][row] == 0.0 { 0.0 } else { (b[row] - tail) / a[row][row] };
    }
    x
}

/// Feasibility-preserving backtracking step; returns the barrier values before and after.
fn line_search(
    chain: &PairChain,
    x: &mut Vec<Vec<f64>>,
    dx: &[Vec<f64>],
    grad: &[Vec<f64>],
    tb: f64,
) -> Option<(f64, f64)> {
    let mut s_max = f64::INFINITY;
    for g in 0..x.len() {
        for y in 0..x[g].len() {
            if dx[g][y] < 0.0 {
                s_max = s_max.min(-x[g][y] / dx[g][y]);
            }
            if g > 0 {
                let b = chain.budgets[g];
                let d = x[g][y] - x[g - 1][y];
                let dd = dx[g][y] - dx[g - 1][y];
                if dd > 0.0 {
                    s_max = s_max.min((b - d) / dd);
                } else if dd < 0.0 {
                    s_max = s_max.min((b + d) / -dd);
                }
            }
        }
    }
    let mut step = (0.99 * s_max).min(1.0);
    let slope: f64 = grad.iter().flatten().zip(dx.iter().flatten()).map(|(g, d)| g * d).sum();
    let f0 = barrier(chain, x, tb);
    let mut trial = x.clone();
    while step > 1e-16 {
        for g in 0..x.len() {
            for y in 0..x[g].len() {
                trial[g][y] = x[g][y] + step * dx[g][y];
            }
        }
        let f = barrier(chain, &trial, tb);
        if f <= f0 + ARMIJO * step * slope {
            *x = trial;
            return Some((f0, f));
        }
        step *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::Transition;

    fn data(n: usize, triples: &[(usize, usize, usize, usize)]) -> TransitionDataset {
        let tr = triples
            .iter()
            .map(|&(time, state, action, next)| Transition { time, state, action, next })
            .collect();
        TransitionDataset::from_triples(n, 1, tr).unwrap()
    }

    #[test]
    fn single_observation_goes_to_one() {
        let d = data(3, &[(0, 1, 0, 2)]);
        let est = solve_cmle(&d, &[0.1; 4], &CmleOptions::default()).unwrap();
        assert!((est.latest().prob(1, 0, 2) - 1.0).abs() < 1e-8);
        assert_eq!(est.latest().row(0, 0), &[1.0 / 3.0; 3]);
        assert!(est.max_violation(&[0.1; 4]) <= 1e-8);
    }

    #[test]
    fn conflicting_pair_splits_the_budget() {
        // Two observations of the same pair with opposite outcomes and budget 0.2.
        let d = data(2, &[(0, 0, 0, 0), (1, 0, 0, 1)]);
        let drift = [0.2, 0.0];
        let est = solve_cmle(&d, &drift, &CmleOptions::default()).unwrap();
        assert!((est.kernels[0].prob(0, 0, 0) - 0.6).abs() < 1e-6);
        assert!((est.kernels[1].prob(0, 0, 1) - 0.6).abs() < 1e-6);
        assert!(est.max_violation(&drift) <= 1e-8);
    }

    #[test]
    fn zero_budget_pools_counts() {
        let d = data(2, &[(0, 0, 0, 0), (1, 0, 0, 1), (2, 0, 0, 1)]);
        let est = solve_cmle(&d, &[0.0; 3], &CmleOptions::default()).unwrap();
        for k in 0..3 {
            assert!((est.kernels[k].prob(0, 0, 1) - 2.0 / 3.0).abs() < 1e-7);
        }
    }

    #[test]
    fn interpolates_between_distant_occurrences() {
        let triples = [(0, 0, 0, 0), (1, 1, 0, 0), (2, 1, 0, 0), (3, 0, 0, 1)];
        let d = data(2, &triples);
        let drift = [0.1, 0.1, 0.1, 0.0];
        let est = solve_cmle(&d, &drift, &CmleOptions::default()).unwrap();
        assert!(est.max_violation(&drift) <= 1e-8);
        let p0 = est.kernels[0].prob(0, 0, 0);
        let p3 = est.kernels[3].prob(0, 0, 0);
        assert!((p0 - p3 - 0.3).abs() < 1e-6);
        let p1 = est.kernels[1].prob(0, 0, 0);
        assert!((p0 - p1 - 0.1).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let d = data(2, &[(0, 0, 0, 0), (1, 0, 0, 1)]);
        let opts = CmleOptions {
            max_iters: 2,
            ..CmleOptions::default()
        };
        match solve_cmle(&d, &[0.2, 0.0], &opts) {
            Err(Error::Convergence { iterations, best, .. }) => {
                assert_eq!(iterations, 2);
                assert!(best.max_violation(&[0.2, 0.0]) <= 1e-8);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_data_and_bad_options() {
        let d = TransitionDataset::new(2, 1);
        assert!(solve_cmle(&d, &[0.0], &CmleOptions::default()).is_err());
        let d = data(2, &[(0, 0, 0, 0)]);
        let opts = CmleOptions {
            tol: 0.0,
            ..CmleOptions::default()
        };
        assert!(solve_cmle(&d, &[0.0], &opts).is_err());
    }
}
