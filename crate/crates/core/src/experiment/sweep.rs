use std::path::Path;
use std::thread;

use serde::{Deserialize, Serialize};

use super::output::{Cell, Table};
use super::{execute, ExperimentConfig, ScheduleSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub period: usize,
    pub dr_exact: Option<f64>,
    pub dr_mc: Option<f64>,
    pub stderr: Option<f64>,
    pub bound_total: Option<f64>,
    pub eta: Option<f64>,
    pub error: Option<String>,
}

fn cell(config: &ExperimentConfig, period: usize) -> SweepRow {
    let mut c = config.clone();
    c.schedule = ScheduleSpec::Periodic { period };
    let mut row = SweepRow {
        period,
        dr_exact: None,
        dr_mc: None,
        stderr: None,
        bound_total: None,
        eta: None,
        error: None,
    };
    match execute(&c).map(|rep| rep.summary) {
        Ok(Some(s)) => {
            row.dr_exact = Some(s.dr_exact);
            row.dr_mc = s.dr_mc;
            row.stderr = s.dr_mc_stderr;
            row.bound_total = s.bound_total;
            row.eta = Some(s.eta);
        }
        Ok(None) => row.error = Some("exact evaluation disabled".into()),
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Re-runs `config` with a periodic schedule for each period, one thread per
/// cell. Rows come back sorted by period; failed cells carry their error.
pub fn sweep(config: &ExperimentConfig, periods: &[usize]) -> Result<Vec<SweepRow>> {
    if periods.len() < 2 {
        return Err(Error::Config("a sweep needs at least two periods".into()));
    }
    let mut sorted = periods.to_vec();
    sorted.sort_unstable();
    let rows = thread::scope(|scope| {
        let handles: Vec<_> = sorted.iter().map(|&p| scope.spawn(move || cell(config, p))).collect();
        handles
            .into_iter()
            .zip(&sorted)
            .map(|(h, &p)| {
                h.join().unwrap_or_else(|_| SweepRow {
                    period: p,
                    dr_exact: None,
                    dr_mc: None,
                    stderr: None,
                    bound_total: None,
                    eta: None,
                    error: Some("worker panicked".into()),
                })
            })
            .collect()
    });
    Ok(rows)
}

pub(crate) fn rows_table(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(&["p", "dr_exact", "dr_mc", "stderr", "bound_total", "eta", "error"]);
    for r in rows {
        table.push(vec![
            r.period.into(),
            r.dr_exact.into(),
            r.dr_mc.into(),
            r.stderr.into(),
            r.bound_total.into(),
            r.eta.into(),
            Cell::from(r.error.clone()),
        ]);
    }
    table
}

/// The `sweep.csv` text.
pub fn sweep_table(rows: &[SweepRow]) -> String {
    rows_table(rows).to_csv()
}

/// Writes `sweep.csv` (or `sweep.json`) and the config echo into `dir`.
pub fn write_sweep(dir: &Path, config: &ExperimentConfig, rows: &[SweepRow]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    super::output::write_json(&dir.join("config.json"), config)?;
    rows_table(rows).write(dir, "sweep", config.output_format)
}
