use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::OutputFormat;
use crate::analysis::BoundBreakdown;
use crate::error::Result;
use crate::model::{TvMdp, UpdateSchedule};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Cell {
    Int(usize),
    Bool(bool),
    Float(f64),
    Missing,
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<Option<String>> for Cell {
    fn from(v: Option<String>) -> Self {
        v.map_or(Cell::Missing, Cell::Text)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => u8::from(*v).to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Missing => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Float(v) => Value::from(*v),
            Cell::Missing => Value::Null,
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// A header plus rows of cells, rendered as CSV or as a JSON array of objects.
#[derive(Debug, Clone, Default)]
pub(crate) struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 cells")
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Ok(serde_json::to_string_pretty(&rows)? + "\n")
    }

    /// Writes `stem.csv` or `stem.json` under `dir`.
    pub fn write(&self, dir: &Path, stem: &str, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Csv => fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?,
            OutputFormat::Json => fs::write(dir.join(format!("{stem}.json")), self.to_json()?)?,
        }
        Ok(())
    }
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// `instance.json` and `schedule.json`.
pub fn write_instance(dir: &Path, mdp: &TvMdp, schedule: &UpdateSchedule) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("instance.json"), mdp.to_json()? + "\n")?;
    write_json(&dir.join("schedule.json"), schedule)
}

pub(crate) fn bound_table(bound: &BoundBreakdown) -> Table {
    let mut table = Table::new(&[
        "t",
        "is_update",
        "last_update",
        "update_term",
        "skip_truncation",
        "skip_error",
        "step_total",
    ]);
    for s in &bound.steps {
        table.push(vec![
            s.t.into(),
            s.is_update.into(),
            s.last_update.into(),
            s.update_term.into(),
            s.skip_truncation.into(),
            s.skip_error.into(),
            (s.update_term + s.skip_term()).into(),
        ]);
    }
    table
}

/// One row per step with the update and skip contributions to the bound.
pub fn write_bound(dir: &Path, bound: &BoundBreakdown, format: OutputFormat) -> Result<()> {
    fs::create_dir_all(dir)?;
    bound_table(bound).write(dir, "bound", format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.12345679, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1usize.into(), 0.5.into(), Cell::Missing]);
        t.push(vec![2usize.into(), true.into(), Cell::Text("x,y".into())]);
        assert_eq!(t.to_csv(), "a,b,c\n1,5.0000000000000000e-1,\n2,1,\"x,y\"\n");
        let v: Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(v[0]["b"], 0.5);
        assert!(v[0]["c"].is_null());
        assert_eq!(v[1]["c"], "x,y");
    }
}
