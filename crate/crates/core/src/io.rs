//! File formats. All indices in files are 1-based.
//!
//! * Parameter JSON: `{"schema": "plgnet.theta/1", "p": 3, "entries": [[1, 1, 0.5], [1, 3, -0.2]]}`
//!   with `s ≤ t` and nonzero entries only.
//! * Dense parameter CSV: `p` rows of `p` values.
//! * Sample CSV: headerless, one observation per line, entries `0` or `1`.
//! * Edge list CSV: `s,t,weight` with header.

use std::io::{BufRead, Write};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{SampleMatrix, ThetaMatrix};

pub const THETA_SCHEMA: &str = "plgnet.theta/1";

#[derive(Serialize, Deserialize)]
struct ThetaRepr {
    schema: String,
    p: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl From<&ThetaMatrix> for ThetaRepr {
    fn from(theta: &ThetaMatrix) -> Self {
        let p = theta.p();
        let mut entries = Vec::new();
        for s in 0..p {
            for t in s..p {
                let v = theta.get(s, t);
                if v != 0.0 {
                    entries.push((s + 1, t + 1, v));
                }
            }
        }
        Self {
            schema: THETA_SCHEMA.into(),
            p,
            entries,
        }
    }
}

impl TryFrom<ThetaRepr> for ThetaMatrix {
    type Error = Error;

    fn try_from(repr: ThetaRepr) -> Result<Self> {
        if repr.schema != THETA_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", repr.schema)));
        }
        if repr.p == 0 {
            return Err(Error::Empty("parameter matrix with p = 0".into()));
        }
        let mut theta = ThetaMatrix::zeros(repr.p);
        for (s, t, v) in repr.entries {
            if s == 0 || t == 0 || s > repr.p || t > repr.p || s > t {
                return Err(Error::InvalidIndex(format!(
                    "entry ({s}, {t}) needs 1 <= s <= t <= {}",
                    repr.p
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row: s, col: t });
            }
            theta.set(s - 1, t - 1, v);
        }
        Ok(theta)
    }
}

impl Serialize for ThetaMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ThetaRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ThetaMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ThetaRepr::deserialize(deserializer)?;
        ThetaMatrix::try_from(repr).map_err(D::Error::custom)
    }
}

pub fn theta_to_json(theta: &ThetaMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(theta)?)
}

pub fn theta_from_json(text: &str) -> Result<ThetaMatrix> {
    let repr: ThetaRepr = serde_json::from_str(text)?;
    ThetaMatrix::try_from(repr)
}

pub fn write_theta_csv<W: Write>(theta: &ThetaMatrix, mut out: W) -> Result<()> {
    for s in 0..theta.p() {
        let line: Vec<String> = theta.row(s).iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_theta_csv<R: BufRead>(input: R) -> Result<ThetaMatrix> {
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows += 1;
        for (j, field) in line.split(',').enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}, column {}: {:?} is not a number", i + 1, j + 1, field)))?;
            values.push(v);
        }
    }
    if rows == 0 {
        return Err(Error::Empty("parameter CSV".into()));
    }
    if values.len() != rows * rows {
        return Err(Error::DimensionMismatch {
            what: "parameter CSV entries",
            expected: rows * rows,
            found: values.len(),
        });
    }
    ThetaMatrix::from_dense(rows, values)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Replace every entry other than 0 or 1 (blank, `NA`, `-1`, ...) with 0
    /// instead of rejecting the file.
    pub impute_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSamples {
    pub samples: SampleMatrix,
    pub imputed: usize,
}

fn parse_binary(field: &str) -> Option<u8> {
    match field {
        "0" => Some(0),
        "1" => Some(1),
        other => match other.parse::<f64>() {
            Ok(v) if v == 0.0 => Some(0),
            Ok(v) if v == 1.0 => Some(1),
            _ => None,
        },
    }
}

pub fn read_samples_csv<R: BufRead>(input: R, opts: CsvOptions) -> Result<ParsedSamples> {
    let mut data = Vec::new();
    let mut p = None;
    let mut n = 0;
    let mut imputed = 0;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match p {
            None => p = Some(fields.len()),
            Some(width) if width != fields.len() => {
                return Err(Error::Parse(format!(
                    "line {} has {} fields, expected {width}",
                    i + 1,
                    fields.len()
                )))
            }
            _ => {}
        }
        for (j, field) in fields.iter().enumerate() {
            match parse_binary(field) {
                Some(v) => data.push(v),
                None if opts.impute_zero => {
                    data.push(0);
                    imputed += 1;
                }
                None => {
                    return Err(Error::NotBinary {
                        row: i + 1,
                        col: j + 1,
                        value: (*field).to_string(),
                    })
                }
            }
        }
        n += 1;
    }
    let p = p.ok_or_else(|| Error::Empty("sample CSV has no rows".into()))?;
    Ok(ParsedSamples {
        samples: SampleMatrix::new(n, p, data)?,
        imputed,
    })
}

pub fn write_samples_csv<W: Write>(x: &SampleMatrix, mut out: W) -> Result<()> {
    let mut line = String::with_capacity(2 * x.p());
    for row in x.rows() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push(if *v == 1 { '1' } else { '0' });
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Edges `s < t` with nonzero weight, or positive weight only.
pub fn write_edge_list<W: Write>(theta: &ThetaMatrix, positive_only: bool, mut out: W) -> Result<usize> {
    writeln!(out, "s,t,weight")?;
    let mut count = 0;
    for (s, t, v) in theta.edges() {
        if positive_only && v <= 0.0 {
            continue;
        }
        writeln!(out, "{},{},{v:e}", s + 1, t + 1)?;
        count += 1;
    }
    Ok(count)
}
