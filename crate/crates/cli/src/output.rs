use std::fmt::Write as _;

use anyhow::Result;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Shortest round-trip text, switching to exponent form for very large or
/// very small magnitudes. Independent of the process locale.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    let mut s = String::new();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        write!(s, "{x}").unwrap();
    } else {
        write!(s, "{x:e}").unwrap();
    }
    s
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_number(*x),
        Cell::Int(n) => n.to_string(),
        Cell::Text(t) => t.clone(),
        Cell::Missing => String::new(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
        Cell::Int(n) => Value::from(*n),
        Cell::Text(t) => Value::from(t.as_str()),
        Cell::Missing => Value::Null,
    }
}

pub fn render(table: &Table, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(cell_text))?;
            }
            Ok(w.into_inner()?)
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), cell_json(v)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let mut out = serde_json::to_vec_pretty(&serde_json::json!({
                "columns": table.columns,
                "rows": rows,
            }))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
