//! Convergence reports: `#` metadata lines, then comma-separated rows
//! `case,n,value_re,value_im,limit_re,limit_im,abs_error`.

use std::fmt::Write as _;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const COLUMNS: &str = "case,n,value_re,value_im,limit_re,limit_im,abs_error";

/// 12 significant digits in scientific notation; zero is unsigned.
pub fn sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// `x` as it reads back from [`sci`].
fn printed(x: f64) -> f64 {
    sci(x).parse().expect("formatted float parses")
}

/// Hex-encoded SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub case: String,
    pub n: usize,
    pub value: Complex64,
    pub limit: Complex64,
}

impl Row {
    /// `|value − limit|` computed from the printed columns, so a reparsed
    /// file reproduces it exactly.
    pub fn abs_error(&self) -> f64 {
        let v = Complex64::new(printed(self.value.re), printed(self.value.im));
        let l = Complex64::new(printed(self.limit.re), printed(self.limit.im));
        (v - l).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

impl ConvergenceReport {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    /// Sorts rows by `n`, keeping case order within an `n`.
    pub fn sort(&mut self) {
        self.rows.sort_by_key(|r| r.n);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(COLUMNS);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.case,
                r.n,
                sci(r.value.re),
                sci(r.value.im),
                sci(r.limit.re),
                sci(r.limit.im),
                sci(r.abs_error())
            );
        }
        out
    }

    /// Reads a rendered report back; rejects rows whose `abs_error` column
    /// disagrees with the value and limit columns.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| CliError::Usage(format!("report line {line}: {msg}"));
        let mut report = Self::default();
        let mut seen_header = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if let Some(meta) = line.strip_prefix('#') {
                let (k, v) = meta.trim().split_once('=').ok_or_else(|| bad(lineno, "metadata needs key=value"))?;
                report.meta.push((k.to_string(), v.to_string()));
                continue;
            }
            if !seen_header {
                if line != COLUMNS {
                    return Err(bad(lineno, "missing column header"));
                }
                seen_header = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(lineno, "expected 7 fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(lineno, "malformed number"));
            let row = Row {
                case: f[0].to_string(),
                n: f[1].parse().map_err(|_| bad(lineno, "malformed n"))?,
                value: Complex64::new(num(f[2])?, num(f[3])?),
                limit: Complex64::new(num(f[4])?, num(f[5])?),
            };
            if sci(row.abs_error()) != f[6] {
                return Err(bad(lineno, "abs_error does not match the value and limit columns"));
            }
            report.rows.push(row);
        }
        if !seen_header {
            return Err(CliError::Usage("report has no column header".into()));
        }
        Ok(report)
    }
}
