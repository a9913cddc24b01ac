//! One report, three renderings. JSON is the full serialized report; csv and table
//! show the report's principal rows. Rationals appear as the same `n/d` text in all three.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub struct Report {
    pub json: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// False when a verification found violations; maps to exit status 1.
    pub passed: bool,
}

impl Report {
    pub fn new<T: Serialize>(value: &T, columns: &[&str]) -> anyhow::Result<Self> {
        Ok(Report {
            json: serde_json::to_value(value)?,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            passed: true,
        })
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = cells.into_iter().map(|c| c.to_string()).collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn passed(mut self, ok: bool) -> Self {
        self.passed = ok;
        self
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)?;
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::new();
                for line in std::iter::once(&self.columns).chain(&self.rows) {
                    let cells: Vec<String> = line.iter().map(|c| csv_cell(c)).collect();
                    writeln!(s, "{}", cells.join(","))?;
                }
                s
            }
            Format::Table => {
                let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
                for row in &self.rows {
                    for (w, c) in widths.iter_mut().zip(row) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let mut s = String::new();
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                for (i, line) in std::iter::once(&self.columns).chain(&self.rows).enumerate() {
                    let cells: Vec<String> =
                        line.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    writeln!(s, "{}", cells.join("  ").trim_end())?;
                    if i == 0 {
                        writeln!(s, "{}", rule.join("  "))?;
                    }
                }
                s
            }
        })
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// Compact text of a JSON value; strings are unquoted.
pub fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `(a,b,c)` text of an integer vector.
pub fn vector(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}
