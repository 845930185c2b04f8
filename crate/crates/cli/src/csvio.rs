//! Two-column numeric CSV ingestion.
//!
//! Format: `x,y` rows, an optional header (detected when the first row does
//! not parse as numbers), blank lines ignored. Rows are sorted by x with y
//! carried along; duplicate abscissae are an error naming the later line.

use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Parsed, sorted columns.
#[derive(Debug)]
pub struct XyData {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

pub fn load_xy_csv(path: &Path) -> Result<XyData, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    parse_xy(&text, &path.display().to_string())
}

pub fn parse_xy(text: &str, source: &str) -> Result<XyData, CliError> {
    let mut rows: Vec<(f64, f64, usize)> = Vec::new();
    let mut first_data_row = true;
    for (line_index, raw_line) in text.lines().enumerate() {
        let line_no = line_index + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CliError::data(format!(
                "{source}:{line_no}: expected 2 columns, found {}",
                fields.len()
            )));
        }
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                    return Err(CliError::data(format!(
                        "{source}:{line_no}: non-finite value {bad}"
                    )));
                }
                rows.push((values[0], values[1], line_no));
                first_data_row = false;
            }
            Err(_) if first_data_row => {
                // Header row: only the very first row may be non-numeric.
                first_data_row = false;
            }
            Err(_) => {
                return Err(CliError::data(format!(
                    "{source}:{line_no}: cannot parse \"{line}\" as two numbers"
                )));
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::data(format!("{source}: no data rows")));
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            let line = pair[0].2.max(pair[1].2);
            return Err(CliError::data(format!(
                "{source}:{line}: duplicate x value {}",
                pair[0].0
            )));
        }
    }
    Ok(XyData {
        xs: rows.iter().map(|r| r.0).collect(),
        ys: rows.iter().map(|r| r.1).collect(),
    })
}
