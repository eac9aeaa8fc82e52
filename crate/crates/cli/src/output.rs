//! Flat row records and their json / csv / table renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use cumulant_bounds::{BigRational, BigUint};
use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Exact integer, printed in full.
    Int(String),
    /// Exact rational as `a/b` or `a`.
    Rational(String),
    Float(f64),
    /// A decimal already rendered to a fixed number of digits.
    Decimal(String),
    Bool(bool),
    Text(String),
    Null,
}

impl Cell {
    pub fn int(v: &BigUint) -> Cell {
        Cell::Int(v.to_string())
    }

    pub fn rational(v: &BigRational) -> Cell {
        Cell::Rational(v.to_string())
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn render(&self, scientific: bool) -> String {
        match self {
            Cell::Int(s) | Cell::Rational(s) | Cell::Decimal(s) | Cell::Text(s) => s.clone(),
            Cell::Float(x) => render_float(*x, scientific),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn to_json(&self, scientific: bool) -> Value {
        match self {
            Cell::Int(s) | Cell::Decimal(s) => {
                Value::Number(Number::from_str(s).expect("decimal literal"))
            }
            Cell::Rational(s) | Cell::Text(s) => Value::String(s.clone()),
            Cell::Float(x) if x.is_finite() => Value::Number(
                Number::from_str(&render_float(*x, scientific)).expect("finite float"),
            ),
            Cell::Float(x) => Value::String(render_float(*x, scientific)),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
        }
    }
}

/// Shortest round-trip decimal; `inf`, `-inf` and `nan` for non-finite values.
pub fn render_float(x: f64, scientific: bool) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if scientific {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// `exp(ln)` rendered as `d.ddddddde±k`, valid far beyond the f64 range.
pub fn scientific_from_ln(ln: f64) -> String {
    if ln == f64::NEG_INFINITY {
        return "0e0".into();
    }
    let log10 = ln / std::f64::consts::LN_10;
    let mut exponent = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exponent);
    if mantissa >= 9.999_999_999_5 {
        mantissa = 1.0;
        exponent += 1.0;
    }
    format!("{mantissa:.10}e{exponent}")
}

pub type Row = Vec<(String, Cell)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub command: String,
    pub rows: Vec<Row>,
    pub scientific: bool,
    /// Failed inequality checks; a nonempty list maps to exit code 1.
    pub violations: Vec<String>,
}

impl Record {
    pub fn new(command: &str) -> Self {
        Record {
            command: command.to_string(),
            rows: Vec::new(),
            scientific: false,
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// Union of the column names in order of first appearance.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for row in &self.rows {
            for (k, _) in row {
                if !cols.iter().any(|c| c == k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut map = Map::new();
                for (k, v) in row {
                    map.insert(k.clone(), v.to_json(self.scientific));
                }
                Value::Object(map)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert(
            "schema_version".into(),
            Value::String(SCHEMA_VERSION.into()),
        );
        doc.insert("command".into(), Value::String(self.command.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    fn grid(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let cols = self.columns();
        let body = self
            .rows
            .iter()
            .map(|row| {
                cols.iter()
                    .map(|c| {
                        row.iter()
                            .find(|(k, _)| k == c)
                            .map(|(_, v)| v.render(self.scientific))
                            .unwrap_or_default()
                    })
                    .collect()
            })
            .collect();
        (cols, body)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let (cols, body) = self.grid();
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&cols).expect("in-memory write");
                for line in body {
                    w.write_record(&line).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
            Format::Table => {
                let (cols, body) = self.grid();
                let widths: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        body.iter()
                            .map(|r| r[i].chars().count())
                            .chain([c.chars().count()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let mut out = String::new();
                let line = |out: &mut String, cells: &[String]| {
                    let parts: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, &w)| format!("{c:>w$}"))
                        .collect();
                    let _ = writeln!(out, "{}", parts.join("  ").trim_end());
                };
                line(&mut out, &cols);
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                line(&mut out, &rule);
                for r in &body {
                    line(&mut out, r);
                }
                out
            }
        }
    }
}
