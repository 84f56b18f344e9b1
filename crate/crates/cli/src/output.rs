//! CSV reports and whitespace-separated plot data.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nlheat_core::Grid;

use crate::CliError;

/// Scientific notation with 6 significant digits and a two-digit exponent,
/// e.g. `4.07000e-03`.
pub fn sci(x: f64) -> String {
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Formats a finite value; non-finite values are a numerical failure.
pub fn finite(name: &str, x: f64) -> Result<String, CliError> {
    if x.is_finite() {
        Ok(sci(x))
    } else {
        Err(CliError::Numerical(format!("non-finite value {x} in column {name}")))
    }
}

#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    /// Starts a CSV with a `# key = value` header block.
    pub fn new(header: &[(String, String)], columns: &[&str]) -> Self {
        let mut text = String::new();
        for (k, v) in header {
            let _ = writeln!(text, "# {k} = {v}");
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.text)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Plot data: one row per node with the coordinates followed by the value.
pub fn solution_dat(grid: &Grid, y: &[f64]) -> Result<String, CliError> {
    let mut out = String::new();
    for (i, &v) in y.iter().enumerate() {
        let coords: Vec<String> = grid.point(i).iter().map(|&c| sci(c)).collect();
        let _ = writeln!(out, "{} {}", coords.join(" "), finite("u", v)?);
    }
    Ok(out)
}
