use std::io;
use std::path::{Path, PathBuf};

use avauction_core::money::ratio_to_decimal;
use avauction_core::{Money, Ratio};

/// A named CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        ResultTable {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `<dir>/<name>.csv`, creating `dir` if needed.
    pub fn write_to(&self, dir: &Path) -> io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.name));
        let csv = self.to_csv().map_err(io::Error::other)?;
        std::fs::write(&path, csv)?;
        Ok(path)
    }
}

/// Exact mean of money amounts, as a six-digit decimal. Empty input gives
/// an empty cell.
pub fn money_mean(values: &[Money]) -> String {
    if values.is_empty() {
        return String::new();
    }
    let sum: i128 = values.iter().map(|m| m.micros() as i128).sum();
    ratio_to_decimal(Ratio::new(sum, values.len() as i128 * 1_000_000))
}

pub fn float_cell(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6}")).unwrap_or_default()
}
