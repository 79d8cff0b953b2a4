//! CSV and JSON emitters.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub const FORMAT_VERSION: u32 = 1;

/// Twelve significant digits; fixed notation for moderate magnitudes.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..12).contains(&exp) {
        format!("{x:.*}", (11 - exp) as usize)
    } else {
        sci
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// CSV table with a versioned comment line ahead of the header row.
pub struct Table {
    name: &'static str,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&str]) -> Self {
        Table { name, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(name: &'static str, header: Vec<String>) -> Self {
        Table { name, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?;
        Ok(format!("# supercoeff {} v{FORMAT_VERSION}\r\n{body}", self.name))
    }
}

/// Write to `path`, or to stdout when `path` is None.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(5.61), "5.61000000000");
        assert_eq!(num(-2.584123456789123), "-2.58412345679");
        assert_eq!(num(123456.0), "123456.000000");
        assert_eq!(num(1.5e-7), "1.50000000000e-7");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn rounding_into_next_decade() {
        assert_eq!(num(9.999999999999), "10.0000000000");
    }

    #[test]
    fn values_parse_back_within_precision() {
        for x in [3.14159265358979, -0.000123456789012345, 6.02214076e23, 42.0] {
            let y: f64 = num(x).parse().unwrap();
            assert!(((y - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn header_is_versioned() {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let s = t.render().unwrap();
        assert!(s.starts_with("# supercoeff demo v1\r\na,b\r\n"));
        assert!(s.contains("\"x,y\""));
    }
}
