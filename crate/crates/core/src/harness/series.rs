//! Column-oriented time series with CSV output.

use std::collections::BTreeMap;

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    /// Free-form key/value metadata (config hash, grid, scheme, ...).
    pub metadata: BTreeMap<String, String>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row; the first entry must strictly exceed the previous one.
    pub fn push(&mut self, row: Vec<f64>) -> Result<(), HarnessError> {
        if row.len() != self.columns.len() {
            return Err(HarnessError::Series(format!(
                "row has {} values, expected {}",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(prev) = self.rows.last() {
            if !(row[0] > prev[0]) {
                return Err(HarnessError::Series(format!(
                    "first column must increase strictly: {} after {}",
                    row[0], prev[0]
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push_str("\r\n");
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
            out.push_str(&cells.join(","));
            out.push_str("\r\n");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| HarnessError::Series("empty CSV".into()))?;
        let mut series = Self::new(header.split(','));
        for line in lines.filter(|l| !l.is_empty()) {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| HarnessError::Series(format!("bad value '{c}': {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            series.push(row)?;
        }
        Ok(series)
    }
}

/// Shortest round-trip decimal form, switching to exponent notation for very
/// small or large magnitudes.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
