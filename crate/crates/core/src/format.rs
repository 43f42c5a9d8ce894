//! Rendering of numbers and tables as CSV, Markdown or JSON.
//!
//! Numbers are printed with a fixed number of decimals. Rust's fixed
//! precision formatting rounds the exact binary value, and exact ties go to
//! the even digit, so this is round-half-to-even.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: usize = 7;
pub const MAX_PRECISION: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv, markdown or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Markdown => "markdown",
            Format::Json => "json",
        })
    }
}

pub fn check_precision(precision: usize) -> Result<()> {
    if (1..=MAX_PRECISION).contains(&precision) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "precision {precision} outside 1..={MAX_PRECISION}"
        )))
    }
}

/// `value` with `precision` decimals, ties to even, no negative zero.
pub fn fixed(value: f64, precision: usize) -> String {
    let s = format!("{value:.precision$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// A header plus rows of cells; numeric cells are formatted on output.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
}

impl Grid {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Grid {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    fn text_rows(&self, precision: usize) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Text(s) => s.clone(),
                        Cell::Number(v) => fixed(*v, precision),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn render(&self, format: Format, precision: usize) -> Result<String> {
        check_precision(precision)?;
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::InvalidSpec(format!("CSV output failed: {e}"));
                w.write_record(&self.header).map_err(io)?;
                for row in self.text_rows(precision) {
                    w.write_record(&row).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::InvalidSpec(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
            }
            Format::Markdown => {
                let mut out = String::new();
                out.push_str(&format!("| {} |\n", self.header.join(" | ")));
                out.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
                for row in self.text_rows(precision) {
                    out.push_str(&format!("| {} |\n", row.join(" | ")));
                }
                Ok(out)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj = self
                            .header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| {
                                let v = match c {
                                    Cell::Text(s) => Value::String(s.clone()),
                                    // parse back so JSON carries the rounded number
                                    Cell::Number(v) => fixed(*v, precision)
                                        .parse::<f64>()
                                        .ok()
                                        .and_then(|x| serde_json::Number::from_f64(x).map(Value::Number))
                                        .unwrap_or(Value::Null),
                                };
                                (h.clone(), v)
                            })
                            .collect::<serde_json::Map<_, _>>();
                        Value::Object(obj)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&json!(rows)).expect("JSON values serialize");
                s.push('\n');
                Ok(s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_to_even() {
        assert_eq!(fixed(0.125, 2), "0.12");
        assert_eq!(fixed(0.375, 2), "0.38");
        assert_eq!(fixed(2.5, 1), "2.5");
        assert_eq!(fixed(0.25, 1), "0.2");
        assert_eq!(fixed(-0.00000001, 7), "0.0000000");
        assert_eq!(fixed(0.04443329570, 7), "0.0444333");
    }

    #[test]
    fn precision_bounds() {
        assert!(check_precision(0).is_err());
        assert!(check_precision(16).is_err());
        assert!(check_precision(15).is_ok());
    }

    #[test]
    fn renders_all_formats() {
        let mut g = Grid::new(["row", "C"]);
        g.push(vec![Cell::Text("A".into()), Cell::Number(0.0444332957)]);
        assert_eq!(g.render(Format::Csv, 7).unwrap(), "row,C\nA,0.0444333\n");
        assert_eq!(g.render(Format::Markdown, 3).unwrap(), "| row | C |\n|---|---|\n| A | 0.044 |\n");
        let v: Value = serde_json::from_str(&g.render(Format::Json, 7).unwrap()).unwrap();
        assert_eq!(v[0]["C"], json!(0.0444333));
    }
}
