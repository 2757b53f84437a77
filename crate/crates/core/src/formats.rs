//! Plain-text formats for length spectra and eigenvalue lists.
//!
//! Length spectrum:
//!
//! ```text
//! # comment
//! genus 2
//! oriented false          # optional, default false
//! 3.057 24 unknown        # <length> <multiplicity> <class>
//! ```
//!
//! Eigenvalue list: `genus <int>` followed by one eigenvalue per line, nondecreasing,
//! starting at 0. Blank lines and `#` comments are ignored everywhere. Numbers are written
//! with the shortest representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trace_stats::{EigenvalueList, GeodesicClass, GeodesicEntry, LengthSpectrum};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty, comment-stripped lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_genus(line: Option<(usize, &str)>) -> Result<u32> {
    let (n, body) = line.ok_or_else(|| parse_error(0, "missing 'genus <int>' header"))?;
    let mut it = body.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some("genus"), Some(g), None) => {
            let genus: u32 = g
                .parse()
                .map_err(|_| parse_error(n, format!("invalid genus '{g}'")))?;
            if genus < 2 {
                return Err(parse_error(n, "genus must be at least 2"));
            }
            Ok(genus)
        }
        _ => Err(parse_error(n, "expected 'genus <int>' header")),
    }
}

fn parse_f64(n: usize, s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| parse_error(n, format!("invalid {what} '{s}'")))
}

pub fn parse_length_spectrum(text: &str) -> Result<LengthSpectrum> {
    let mut lines = content_lines(text).peekable();
    let genus = parse_genus(lines.next())?;
    let mut oriented = false;
    if let Some(&(n, body)) = lines.peek() {
        if body.starts_with("oriented") {
            let mut it = body.split_whitespace().skip(1);
            oriented = match (it.next(), it.next()) {
                (Some("true"), None) => true,
                (Some("false"), None) => false,
                _ => return Err(parse_error(n, "expected 'oriented true|false'")),
            };
            lines.next();
        }
    }
    let mut entries: Vec<GeodesicEntry> = Vec::new();
    for (n, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_error(n, "expected '<length> <multiplicity> <class>'"));
        }
        let length = parse_f64(n, fields[0], "length")?;
        if !(length.is_finite() && length > 0.0) {
            return Err(parse_error(
                n,
                format!("length must be positive, got {length}"),
            ));
        }
        if let Some(prev) = entries.last() {
            if length <= prev.length {
                return Err(parse_error(
                    n,
                    format!(
                        "lengths must be strictly increasing ({length} after {})",
                        prev.length
                    ),
                ));
            }
        }
        let multiplicity: u64 = fields[1]
            .parse()
            .map_err(|_| parse_error(n, format!("invalid multiplicity '{}'", fields[1])))?;
        if multiplicity == 0 {
            return Err(parse_error(n, "multiplicity must be >= 1"));
        }
        let class: GeodesicClass = fields[2]
            .parse()
            .map_err(|_| parse_error(n, format!("unknown class '{}'", fields[2])))?;
        entries.push(GeodesicEntry {
            length,
            multiplicity,
            class,
        });
    }
    LengthSpectrum::new(genus, entries, oriented)
}

pub fn write_length_spectrum(spec: &LengthSpectrum) -> String {
    let mut out = format!("genus {}\n", spec.genus());
    if spec.oriented() {
        out.push_str("oriented true\n");
    }
    for e in spec.entries() {
        writeln!(out, "{} {} {}", e.length, e.multiplicity, e.class).expect("write to String");
    }
    out
}

pub fn read_length_spectrum(path: impl AsRef<Path>) -> Result<LengthSpectrum> {
    parse_length_spectrum(&std::fs::read_to_string(path)?)
}

pub fn save_length_spectrum(path: impl AsRef<Path>, spec: &LengthSpectrum) -> Result<()> {
    std::fs::write(path, write_length_spectrum(spec))?;
    Ok(())
}

pub fn parse_eigenvalues(text: &str) -> Result<EigenvalueList> {
    let mut lines = content_lines(text);
    let genus = parse_genus(lines.next())?;
    let mut values: Vec<f64> = Vec::new();
    for (n, body) in lines {
        let v = parse_f64(n, body, "eigenvalue")?;
        if !v.is_finite() {
            return Err(parse_error(n, "eigenvalue must be finite"));
        }
        match values.last() {
            None if v != 0.0 => return Err(parse_error(n, "first eigenvalue must be 0")),
            Some(&prev) if v < prev => {
                return Err(parse_error(
                    n,
                    format!("eigenvalues must be nondecreasing ({v} after {prev})"),
                ))
            }
            _ => {}
        }
        values.push(v);
    }
    EigenvalueList::new(genus, values)
}

pub fn write_eigenvalues(list: &EigenvalueList) -> String {
    let mut out = format!("genus {}\n", list.genus());
    for v in list.values() {
        writeln!(out, "{v}").expect("write to String");
    }
    out
}

pub fn read_eigenvalues(path: impl AsRef<Path>) -> Result<EigenvalueList> {
    parse_eigenvalues(&std::fs::read_to_string(path)?)
}

pub fn save_eigenvalues(path: impl AsRef<Path>, list: &EigenvalueList) -> Result<()> {
    std::fs::write(path, write_eigenvalues(list))?;
    Ok(())
}
