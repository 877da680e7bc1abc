use std::path::Path;

use super::{HarnessError, SlopeFit};

/// `v` with 17 significant digits, enough to round-trip any `f64`.
pub fn format_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn pass_cell(pass: bool) -> String {
    if pass { "PASS" } else { "FAIL" }.to_string()
}

/// Rows of one run in canonical order, the overall verdict and, for
/// convergence runs, the per-rule slope fits.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    pub passed: bool,
    pub fits: Vec<SlopeFit>,
}

impl RunOutput {
    pub fn to_csv(&self) -> Result<Vec<u8>, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| HarnessError::Config(format!("CSV encoding failed: {e}"));
        w.write_record(self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner()
            .map_err(|e| HarnessError::Config(format!("CSV encoding failed: {e}")))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_csv()?).map_err(|e| HarnessError::io(path, e))
    }
}
