//! Plain-text rendering shared by the reporting commands.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Tsv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(OutputFormat::Tsv),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::argument(format!(
                "unknown format `{other}` (expected tsv or table)"
            ))),
        }
    }
}

/// Round half up to two decimals and format, e.g. `0.360717` → `"36.07"`
/// when given `100.0 * 0.360717`.
pub fn fmt2(value: f64) -> String {
    format!("{:.2}", round2(value))
}

pub fn round2(value: f64) -> f64 {
    // f64::round is half-away-from-zero, i.e. half-up for non-negative input
    (value * 100.0).round() / 100.0
}

/// `100 * num / den` rounded half up to hundredths, computed exactly.
/// Returns the value in hundredths (`3607` for 36.07 %). Zero when
/// `den == 0`.
pub fn percent_hundredths(num: u64, den: u64) -> u64 {
    scaled_hundredths(100 * num as u128, den)
}

/// `num / den` rounded half up to hundredths, exactly.
pub fn ratio_hundredths(num: u64, den: u64) -> u64 {
    scaled_hundredths(num as u128, den)
}

fn scaled_hundredths(num: u128, den: u64) -> u64 {
    if den == 0 {
        return 0;
    }
    let den = den as u128;
    ((200 * num + den) / (2 * den)) as u64
}

pub fn hundredths_to_f64(h: u64) -> f64 {
    h as f64 / 100.0
}

pub fn render(format: OutputFormat, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Tsv => {
            out.push_str(&header.join("\t"));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        OutputFormat::Table => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for row in rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(header.to_vec()));
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            let _ = writeln!(out, "{}", rule.join("  "));
            for row in rows {
                let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
            }
        }
    }
    out
}
