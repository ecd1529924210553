//! Tables written as CSV (one header line naming columns and units) or as
//! JSON with the same columns. Floats carry 12 significant digits.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::{CliError, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

impl Column {
    pub const fn new(name: &'static str, unit: &'static str) -> Self {
        Column { name, unit }
    }

    fn header(&self) -> String {
        format!("{} [{}]", self.name, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

/// `%.12g`-style rendering; `-0` prints as `0`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string().to_ascii_lowercase();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT_DIGITS as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The float as it is printed, read back.
pub fn rounded(v: f64) -> f64 {
    format_float(v).parse().expect("formatted float parses")
}

pub fn json_number(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    Number::from_f64(rounded(v))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Every number must be finite.
    pub fn check_finite(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(CliError::Core(gdl_core::GdlError::Model(format!(
                            "non-finite value {v} in column '{}' of row {i}",
                            self.columns[c].name
                        ))));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(self.columns.iter().map(Column::header))?;
        for row in &self.rows {
            out.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => format_float(*v),
                Cell::Int(v) => v.to_string(),
                Cell::Text(s) => s.clone(),
            }))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let columns = self
            .columns
            .iter()
            .map(|c| serde_json::json!({ "name": c.name, "unit": c.unit }))
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Num(v) => json_number(*v),
                        Cell::Int(v) => Value::from(*v),
                        Cell::Text(s) => Value::from(s.as_str()),
                    };
                    m.insert(col.name.to_string(), v);
                }
                Value::Object(m)
            })
            .collect();
        let mut m = Map::new();
        m.insert("columns".into(), Value::Array(columns));
        m.insert("rows".into(), Value::Array(rows));
        Value::Object(m)
    }

    pub fn write<W: Write>(&self, format: Format, mut w: W) -> Result<()> {
        self.check_finite()?;
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &self.to_json())?;
                writeln!(w)?;
                Ok(())
            }
        }
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| {
                CliError::Io(io::Error::new(
                    e.kind(),
                    format!("cannot write {}: {e}", p.display()),
                ))
            })?;
            let mut w = io::BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(0.5 / 0.6), "0.833333333333");
        assert_eq!(format_float(7.905694150420949e-3), "0.00790569415042");
        assert_eq!(format_float(4.216370213557839), "4.21637021356");
        assert_eq!(format_float(1.5e-7), "1.5e-7");
        assert_eq!(format_float(-2.0e13), "-2e13");
        assert_eq!(format_float(123456789012.4), "123456789012");
        assert_eq!(format_float(9.9999999999996), "10");
        assert_eq!(rounded(1.0 / 3.0), 0.333333333333);
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(json_number(f64::INFINITY), Value::Null);
    }

    #[test]
    fn csv_and_json_share_the_schema() {
        let mut t = Table::new(vec![
            Column::new("phase", "-"),
            Column::new("P", "N"),
            Column::new("n", "-"),
        ]);
        t.push(vec![
            "elastic".into(),
            4.216370213557839.into(),
            3usize.into(),
        ]);
        let mut buf = Vec::new();
        t.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "phase [-],P [N],n [-]\nelastic,4.21637021356,3\n"
        );
        let j = t.to_json();
        assert_eq!(j["columns"][1]["unit"], "N");
        assert_eq!(j["rows"][0]["P"].as_f64().unwrap(), 4.21637021356);
        assert_eq!(j["rows"][0]["phase"], "elastic");
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut t = Table::new(vec![Column::new("x", "-")]);
        t.push(vec![f64::NAN.into()]);
        assert!(t.write(Format::Csv, Vec::new()).is_err());
    }
}
