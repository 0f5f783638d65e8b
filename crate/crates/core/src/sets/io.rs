use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use super::{LatticePoint, PointSet};
use crate::error::{Error, Result};

/// Parses the point-set text format: one point per line as space-separated
/// decimal integers, `#` comment lines and blank lines ignored. The ambient
/// dimension is fixed by the first point.
pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let (dim, points) = parse_lines(text)?;
    PointSet::new(dim, points)
}

/// Like [`parse_point_set`] but keeps file order and duplicates.
pub fn parse_point_list(text: &str) -> Result<Vec<LatticePoint>> {
    parse_lines(text).map(|(_, pts)| pts)
}

fn parse_lines(text: &str) -> Result<(usize, Vec<LatticePoint>)> {
    let mut dim = None;
    let mut points = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords = parse_ints(line).map_err(|message| Error::Parse { line: n + 1, message })?;
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("expected {d} coordinates, found {}", coords.len()),
                })
            }
            _ => {}
        }
        points.push(LatticePoint::new(coords));
    }
    let dim = dim.ok_or(Error::Parse { line: 0, message: "no points in input".into() })?;
    Ok((dim, points))
}

pub(crate) fn parse_ints(line: &str) -> std::result::Result<Vec<BigInt>, String> {
    let coords: Vec<BigInt> = line
        .split_whitespace()
        .map(|tok| tok.parse::<BigInt>().map_err(|_| format!("not an integer: {tok:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if coords.is_empty() {
        return Err("empty point".into());
    }
    Ok(coords)
}

impl FromStr for PointSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_point_set(s)
    }
}

impl fmt::Display for PointSet {
    /// One point per line in lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}
