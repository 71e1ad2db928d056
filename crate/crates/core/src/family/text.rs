//! The family text format.
//!
//! ```text
//! n=3 p=2
//! # comment lines start with '#'
//! 000
//! 110
//! ```
//!
//! Each member is one line of `n` base-`p` digits, coordinate 1 first (the
//! most significant digit is last). Digits above 9 use `a`–`z`, so the
//! format covers moduli up to 36. Blank lines are ignored. Output is always
//! the header followed by the members in canonical order.

use super::{decode_point, encode_point, PointSet};
use crate::error::{Error, Result};

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(u32, u64)> {
    let mut n = None;
    let mut p = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_error(line_no, format!("malformed header field '{field}'")))?;
        let slot = match key {
            "n" => &mut n,
            "p" => &mut p,
            _ => return Err(parse_error(line_no, format!("unknown header key '{key}'"))),
        };
        let v: u64 = value.parse().map_err(|_| {
            parse_error(line_no, format!("header value '{value}' is not an integer"))
        })?;
        if slot.replace(v).is_some() {
            return Err(parse_error(
                line_no,
                format!("duplicate header key '{key}'"),
            ));
        }
    }
    let n = n.ok_or_else(|| parse_error(line_no, "header is missing n=<int>"))?;
    let p = p.ok_or_else(|| parse_error(line_no, "header is missing p=<int>"))?;
    if p > 36 {
        return Err(parse_error(
            line_no,
            format!("modulus {p} has no digit alphabet (max 36)"),
        ));
    }
    let n = u32::try_from(n).map_err(|_| parse_error(line_no, "n is too large"))?;
    Ok((n, p))
}

/// Parses the family text format into a point set (possibly empty).
pub fn parse_family_text(input: &str) -> Result<PointSet> {
    let mut header = None;
    let mut points = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((n, p)) = header else {
            header = Some(parse_header(line_no, line)?);
            continue;
        };
        if line.len() != n as usize {
            return Err(parse_error(
                line_no,
                format!("expected {n} digits, found {}", line.len()),
            ));
        }
        let digits = line
            .bytes()
            .map(|b| {
                DIGITS
                    .iter()
                    .position(|&d| d == b.to_ascii_lowercase())
                    .map(|d| d as u64)
                    .filter(|&d| d < p)
                    .ok_or_else(|| {
                        parse_error(line_no, format!("'{}' is not a base-{p} digit", b as char))
                    })
            })
            .collect::<Result<Vec<u64>>>()?;
        points.push(encode_point(p, &digits));
    }
    let (n, p) = header.ok_or_else(|| parse_error(1, "missing header line 'n=<int> p=<int>'"))?;
    PointSet::new(p, n, points).map_err(|e| parse_error(1, e.to_string()))
}

/// Writes a point set in the family text format.
pub fn format_family_text(set: &PointSet) -> String {
    let p = set.modulus();
    let n = set.dimension();
    let mut out = format!("n={n} p={p}\n");
    for &x in set.points() {
        out.extend(
            decode_point(p, n, x)
                .into_iter()
                .map(|d| DIGITS[d as usize] as char),
        );
        out.push('\n');
    }
    out
}
