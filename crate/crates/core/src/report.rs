//! Serialization of reports: JSON summaries and per-n CSV rows.
//!
//! Rationals are written as `"p/q"` strings (always with an explicit
//! denominator) so that output is exact and byte-stable.

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serializer;

use crate::error::{Error, Result};
use crate::sieve::SieveRow;

pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

pub(crate) fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown output format '{other}'"))),
        }
    }
}

pub const CSV_HEADER: &str = "n,f(n),sign,factorization,squarefree_flag,witness_prime";

/// One line per row: `n, f(n), sign, p^e factors, flag, witness`.
pub fn render_rows_csv(rows: &[SieveRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let witness = row.exception.map(|(_, p)| p.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.n,
            row.value(),
            row.factorization.sign(),
            row.factorization.render(),
            u8::from(row.is_good()),
            witness
        );
    }
    out
}

/// Writes `contents` to `path`, attaching the path to any I/O error.
pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}
