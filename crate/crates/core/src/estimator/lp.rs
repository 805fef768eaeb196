//! Small dense two-phase simplex for `x ≥ 0` programs.
//!
//! Phase one runs once per constraint set; every objective then re-prices the
//! same feasible basis, which is what the coordinate-range queries need.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn add(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.n_vars, "constraint width");
        self.rows.push((coeffs, rel, rhs));
    }

    /// Sparse form of [`LinearProgram::add`].
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], rel: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.n_vars];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.add(coeffs, rel, rhs);
    }

    /// Runs phase one. Returns `Ok(None)` when the program is infeasible.
    pub fn feasible(&self) -> Result<Option<FeasibleTableau>> {
        let n = self.n_vars;
        let n_slack = self.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = self
            .rows
            .iter()
            .filter(|r| match r.1 {
                Relation::Eq => true,
                Relation::Le => r.2 < 0.0,
                Relation::Ge => r.2 >= 0.0,
            })
            .count();
        let width = n + n_slack + n_art;
        let mut t = Vec::with_capacity(self.rows.len());
        let mut basis = Vec::with_capacity(self.rows.len());
        let (mut slack, mut art) = (n, n + n_slack);
        let art_start = art;
        for (coeffs, rel, rhs) in &self.rows {
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; width + 1];
            for (j, c) in coeffs.iter().enumerate() {
                row[j] = sign * c;
            }
            row[width] = sign * rhs;
            let slack_coef = match rel {
                Relation::Le => Some(sign),
                Relation::Ge => Some(-sign),
                Relation::Eq => None,
            };
            if let Some(c) = slack_coef {
                row[slack] = c;
                if c > 0.0 {
                    basis.push(slack);
                    slack += 1;
                    t.push(row);
                    continue;
                }
                slack += 1;
            }
            row[art] = 1.0;
            basis.push(art);
            art += 1;
            t.push(row);
        }
        let mut tab = Tableau { t, basis, width };
        let phase1: Vec<f64> = (0..width).map(|j| if j >= art_start { -1.0 } else { 0.0 }).collect();
        let value = tab.maximize(&phase1, width)?;
        if value < -FEAS_TOL {
            return Ok(None);
        }
        tab.drive_out(art_start);
        tab.drop_columns(art_start);
        Ok(Some(FeasibleTableau { tab, n_vars: n }))
    }
}

#[derive(Debug, Clone)]
pub struct FeasibleTableau {
    tab: Tableau,
    n_vars: usize,
}

impl FeasibleTableau {
    pub fn maximize(&self, objective: &[f64]) -> Result<LpSolution> {
        let mut tab = self.tab.clone();
        let mut c = vec![0.0; tab.width];
        c[..self.n_vars].copy_from_slice(objective);
        let value = tab.maximize(&c, tab.width)?;
        Ok(LpSolution {
            value,
            x: tab.solution(self.n_vars),
        })
    }

    pub fn minimize(&self, objective: &[f64]) -> Result<LpSolution> {
        let neg: Vec<f64> = objective.iter().map(|c| -c).collect();
        let mut sol = self.maximize(&neg)?;
        sol.value = -sol.value;
        Ok(sol)
    }
}

#[derive(Debug, Clone)]
struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Primal simplex over the first `cols` columns; Dantzig pricing with a Bland fallback.
    fn maximize(&mut self, c: &[f64], cols: usize) -> Result<f64> {
        let limit = 50 * (self.t.len() + cols) + 1000;
        let mut degenerate = 0usize;
        for _ in 0..limit {
            let reduced = |j: usize, tab: &Tableau| -> f64 {
                c[j] - tab
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| c[b] * tab.t[i][j])
                    .sum::<f64>()
            };
            let bland = degenerate > 20;
            let mut enter = None;
            let mut best = PIVOT_TOL;
            for j in 0..cols {
                if self.basis.contains(&j) {
                    continue;
                }
                let r = reduced(j, self);
                if r > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = r;
                }
            }
            let Some(col) = enter else {
                let value = self
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| c[b] * self.rhs(i))
                    .sum();
                return Ok(value);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::InternalConsistency("linear program is unbounded".into()));
            };
            degenerate = if ratio <= 1e-14 { degenerate + 1 } else { 0 };
            self.pivot(row, col);
        }
        Err(Error::InternalConsistency("simplex iteration limit reached".into()))
    }

    fn drive_out(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= art_start {
                let col = (0..art_start)
                    .filter(|j| !self.basis.contains(j))
                    .max_by(|&a, &b| self.t[i][a].abs().total_cmp(&self.t[i][b].abs()));
                match col {
                    Some(j) if self.t[i][j].abs() > PIVOT_TOL => self.pivot(i, j),
                    _ => {
                        self.t.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    fn drop_columns(&mut self, from: usize) {
        let rhs_col = self.width;
        for row in self.t.iter_mut() {
            let rhs = row[rhs_col];
            row.truncate(from);
            row.push(rhs);
        }
        self.width = from;
    }

    fn solution(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        x
    }
}
