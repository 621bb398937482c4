//! Curve database files, one record per line:
//!
//! ```text
//! label | a1 a2 a3 a4 a6 | N | rank | torsion | x,y; x,y | l:m_l,... | p,...
//! ```
//!
//! Coordinates are integers or fractions `p/q`. Blank lines and lines
//! starting with `#` are skipped.

use crate::ec::{CurveProfile, RationalPoint, WeierstrassCurve};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub const BUILTIN_CURVES: &str = include_str!("../../data/curves.txt");

struct Field<'a> {
    text: &'a str,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn split_fields(line: &str) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), '|'))) {
        if c == '|' {
            let raw = &line[start..i];
            let lead = raw.len() - raw.trim_start().len();
            out.push(Field { text: raw.trim(), column: line[..start + lead].chars().count() + 1 });
            start = i + 1;
        }
    }
    out
}

fn parse_int<T: std::str::FromStr>(f: &Field, line: usize, what: &str) -> Result<T> {
    f.text
        .parse()
        .map_err(|_| err(line, f.column, format!("{what}: cannot parse '{}'", f.text)))
}

fn parse_point(s: &str, line: usize, column: usize) -> Result<RationalPoint> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| err(line, column, format!("point '{s}' needs two coordinates")))?;
    let q = |t: &str| -> Result<BigRational> {
        let t = t.trim();
        if let Ok(n) = t.parse::<BigInt>() {
            return Ok(BigRational::from_integer(n));
        }
        t.parse::<BigRational>()
            .map_err(|_| err(line, column, format!("bad coordinate '{t}'")))
    };
    Ok(RationalPoint::Affine { x: q(x)?, y: q(y)? })
}

fn parse_list<T>(f: &Field, line: usize, mut item: impl FnMut(&str) -> Result<T>) -> Result<Vec<T>> {
    f.text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(s).map_err(|_| err(line, f.column, format!("bad entry '{s}'"))))
        .collect()
}

pub fn parse_curve_line(text: &str, line: usize) -> Result<CurveProfile> {
    let fields = split_fields(text);
    if fields.len() != 8 {
        return Err(err(line, 1, format!("expected 8 '|'-separated fields, found {}", fields.len())));
    }
    let label = fields[0].text.to_string();
    if label.is_empty() {
        return Err(err(line, fields[0].column, "empty label"));
    }
    let coeffs: Vec<BigInt> = fields[1]
        .text
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, fields[1].column, format!("bad coefficient '{t}'"))))
        .collect::<Result<_>>()?;
    let a: [BigInt; 5] = coeffs
        .try_into()
        .map_err(|_| err(line, fields[1].column, "expected five coefficients a1 a2 a3 a4 a6"))?;
    let n: u64 = parse_int(&fields[2], line, "conductor")?;
    let rank: u32 = parse_int(&fields[3], line, "rank")?;
    let torsion_order: u64 = parse_int(&fields[4], line, "torsion order")?;
    let curve = WeierstrassCurve::from_bigints(a, n).map_err(|e| err(line, fields[1].column, e.to_string()))?;
    let generators: Vec<RationalPoint> = fields[5]
        .text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_point(s, line, fields[5].column))
        .collect::<Result<_>>()?;
    for g in &generators {
        if let RationalPoint::Affine { x, y } = g {
            if !curve.on_curve(x, y) {
                return Err(err(line, fields[5].column, format!("generator ({x}, {y}) is not on {label}")));
            }
        }
    }
    let tamagawa: BTreeMap<u64, u64> = parse_list(&fields[6], line, |s| {
        let (l, m) = s.split_once(':').ok_or_else(|| err(line, 0, ""))?;
        Ok((l.trim().parse().map_err(|_| err(line, 0, ""))?, m.trim().parse().map_err(|_| err(line, 0, ""))?))
    })?
    .into_iter()
    .collect();
    let nonsurjective_primes: BTreeSet<u64> =
        parse_list(&fields[7], line, |s| s.parse().map_err(|_| err(line, 0, "")))?.into_iter().collect();
    let profile = CurveProfile {
        label,
        curve,
        rank,
        torsion_order,
        generators,
        tamagawa,
        manin_constant_one: true,
        nonsurjective_primes,
    };
    profile.validate().map_err(|e| err(line, 1, e.to_string()))?;
    Ok(profile)
}

pub fn parse_curves(text: &str) -> Result<Vec<CurveProfile>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_curve_line(raw, i + 1)?);
    }
    Ok(out)
}

pub fn parse_curve_file(path: &Path) -> Result<Vec<CurveProfile>> {
    parse_curves(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_database_parses() {
        let c = parse_curves(BUILTIN_CURVES).unwrap();
        let labels: Vec<&str> = c.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, ["11a1", "37a1", "389a1", "701a1"]);
        assert_eq!(c[2].generators.len(), 2);
    }

    #[test]
    fn diagnostics_name_line_and_column() {
        let text = "# header\n37a1 | 0 0 1 -1 0 | 37 | 1 | 1 | 1,1 | 37:1 |\n";
        match parse_curves(text) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 34);
                assert!(message.contains("not on"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_curves("x | 1 2 | 3 | 0 | 1 | | |"), Err(Error::Parse { column: 5, .. })));
        assert!(parse_curves("").unwrap().is_empty());
    }
}
