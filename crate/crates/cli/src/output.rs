//! Tabular output with fixed, locale-free number formatting.

use std::io::Write;
use std::path::Path;

use dualmarket_core::sim::TimeSeriesRecord;
use sha2::{Digest, Sha256};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => (*i).into(),
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Text(s) => s.clone().into(),
        }
    }
}

/// Nine significant digits in plain decimal notation, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> std::io::Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
            Format::JsonLines => {
                let mut out = Vec::new();
                for row in &self.rows {
                    let obj: serde_json::Map<String, serde_json::Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect();
                    serde_json::to_writer(&mut out, &obj)?;
                    out.write_all(b"\n")?;
                }
                Ok(out)
            }
        }
    }
}

pub const RECORD_COLUMNS: [&str; 16] = [
    "t",
    "g_plm",
    "g_tlm",
    "wage",
    "pi_b",
    "pi_w",
    "hires_tlm_b",
    "hires_tlm_w",
    "hires_plm_b",
    "hires_plm_w",
    "mean_effort_rate_q",
    "mean_effort_rate_u",
    "plm_size",
    "tlm_size",
    "earnings_b",
    "earnings_w",
];

pub fn record_cells(r: &TimeSeriesRecord) -> Vec<Cell> {
    use Cell::{Float as F, Int as I};
    vec![
        I(r.t),
        F(r.g_plm),
        F(r.g_tlm),
        F(r.wage),
        F(r.pi_b),
        F(r.pi_w),
        I(r.hires_tlm_b),
        I(r.hires_tlm_w),
        I(r.hires_plm_b),
        I(r.hires_plm_w),
        F(r.mean_effort_rate_q),
        F(r.mean_effort_rate_u),
        I(r.plm_size),
        I(r.tlm_size),
        F(r.earnings_b),
        F(r.earnings_w),
    ]
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `path` and returns their SHA-256.
pub fn write_checked(path: &Path, bytes: &[u8]) -> std::io::Result<String> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(sha256_hex(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(1.5), "1.5");
        assert_eq!(fmt_float(0.806666666666667), "0.806666667");
        assert_eq!(fmt_float(1234567.891234), "1234567.89");
        assert_eq!(fmt_float(-0.000123456789123), "-0.000123456789");
        assert_eq!(fmt_float(2e10), "20000000000");
        assert_eq!(fmt_float(-1e-20), "-0.00000000000000000001");
    }

    #[test]
    fn csv_has_header_and_json_lines_one_object_per_row() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Int(1), Cell::Float(0.25)]);
        t.push(vec![Cell::Int(2), Cell::Text("x".into())]);
        let csv = String::from_utf8(t.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(csv, "a,b\n1,0.25\n2,x\n");
        let jl = String::from_utf8(t.render(Format::JsonLines).unwrap()).unwrap();
        assert_eq!(jl.lines().count(), 2);
        assert!(jl.starts_with("{\"a\":1,\"b\":0.25}"));
    }
}
