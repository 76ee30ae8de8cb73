//! Path CSV files: header `t,value`, one row per breakpoint, strictly
//! increasing `t`. Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ctrwkit_core::cadlag::{GridPath, StepPath};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Serialize, Deserialize)]
struct Row {
    t: f64,
    value: f64,
}

pub fn write_rows<W: Write>(out: W, times: &[f64], values: &[f64]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for (&t, &value) in times.iter().zip(values) {
        w.serialize(Row { t, value })?;
    }
    if times.is_empty() {
        w.write_record(["t", "value"])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a path CSV. Rejects a wrong header, non-finite entries and
/// time columns that are not strictly increasing.
pub fn read_rows<R: Read>(input: R) -> std::result::Result<(Vec<f64>, Vec<f64>), String> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| e.to_string())?;
    if header.len() != 2 || &header[0] != "t" || &header[1] != "value" {
        return Err(format!("expected header `t,value`, got `{}`", header.iter().collect::<Vec<_>>().join(",")));
    }
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (i, row) in r.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        if !row.t.is_finite() || !row.value.is_finite() {
            return Err(format!("row {}: non-finite entry", i + 1));
        }
        if let Some(&prev) = times.last() {
            if row.t <= prev {
                return Err(format!("row {}: time {} does not exceed previous time {prev}", i + 1, row.t));
            }
        }
        times.push(row.t);
        values.push(row.value);
    }
    if times.is_empty() {
        return Err("no rows".into());
    }
    Ok((times, values))
}

pub fn write_step_path(path: &Path, p: &StepPath) -> Result<()> {
    let f = File::create(path).map_err(|e| CliError::write(path, e))?;
    write_rows(f, p.times(), p.values()).map_err(|e| CliError::write(path, e))
}

pub fn write_grid_path(path: &Path, g: &GridPath) -> Result<()> {
    let times: Vec<f64> = (0..g.len()).map(|k| g.time(k)).collect();
    let f = File::create(path).map_err(|e| CliError::write(path, e))?;
    write_rows(f, &times, g.values()).map_err(|e| CliError::write(path, e))
}

/// Step path from a CSV; the horizon defaults to the last breakpoint.
pub fn read_step_path(path: &Path, horizon: Option<f64>) -> Result<StepPath> {
    let f = File::open(path).map_err(|e| CliError::read(path, e))?;
    let (times, values) = read_rows(f).map_err(|e| CliError::format(path, e))?;
    let horizon = horizon.unwrap_or(*times.last().unwrap());
    StepPath::new(times, values, horizon).map_err(|e| CliError::format(path, e))
}
