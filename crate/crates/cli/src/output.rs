//! Rendering of results as JSON, CSV or plain text.

use clap::ValueEnum;
use serde_json::Value;

use g2toolkit::coflow::FlowTrajectory;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn scalar_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.16e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// Flattens nested objects into dotted keys; arrays stay as JSON text.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_cell(other))),
    }
}

fn write_rows(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

/// One row per record for arrays of objects, a single row otherwise.
pub fn csv_generic<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Output(e.to_string()))?;
    let records: Vec<Value> = match v {
        Value::Array(items) => items,
        other => vec![other],
    };
    let mut header: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for r in &records {
        let mut cells = Vec::new();
        flatten("", r, &mut cells);
        if header.is_empty() {
            header = cells.iter().map(|(k, _)| if k.is_empty() { "value".into() } else { k.clone() }).collect();
        }
        rows.push(cells.into_iter().map(|(_, c)| c).collect());
    }
    write_rows(&header, &rows)
}

pub const FLOW_COLUMNS: [&str; 12] = ["t", "a1", "a2", "b1", "b2", "c1", "c2", "N", "F", "r", "s", "tc"];

/// Full-precision trajectory table; `F` is empty on flat states.
pub fn flow_csv(traj: &FlowTrajectory) -> Result<String, CliError> {
    let header: Vec<String> = FLOW_COLUMNS.iter().map(|s| s.to_string()).collect();
    let cell = |x: f64| format!("{x:.16e}");
    let rows: Vec<Vec<String>> = traj
        .samples
        .iter()
        .map(|s| {
            let mut row = vec![cell(s.t)];
            row.extend(s.params.to_array().iter().map(|&x| cell(x)));
            row.push(cell(s.n));
            row.push(s.f.map(cell).unwrap_or_default());
            row.extend([cell(s.r), cell(s.s), cell(s.t_coef)]);
            row
        })
        .collect();
    write_rows(&header, &rows)
}
