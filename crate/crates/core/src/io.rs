//! Plain-text artifact formats.
//!
//! CSV files use a header row, `,` separators, `\n` line endings and every
//! float written with 17 significant digits, so identical runs produce
//! byte-identical files.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// `x` with 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn csv_table<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses a numeric CSV with a header row; returns the header and rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?
        .1
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines {
        let row = line
            .split(',')
            .map(|c| {
                c.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("line {}: cannot parse {c:?} as a number", i + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::InvalidInput(format!(
                "line {}: expected {} columns, found {}",
                i + 1,
                header.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::ConfigInvalid(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        let x = std::f64::consts::LN_2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_round_trip() {
        let text = csv_table(&["x", "value"], vec![vec![0.5, 1.25], vec![1.0, -3.0]]);
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let (h, rows) = parse_csv(&text).unwrap();
        assert_eq!(h, vec!["x", "value"]);
        assert_eq!(rows, vec![vec![0.5, 1.25], vec![1.0, -3.0]]);
        assert!(parse_csv("a,b\n1,x\n").is_err());
    }
}
