//! Plain-text cache files for q-series and degree-2 expansions. Each file
//! starts with a header line carrying a SHA-256 of the body, which is
//! checked on load.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::maass::SiegelExpansion;
use crate::qseries::QSeries;
use crate::quad::HalfIntMatrix;

fn digest(body: &str) -> String {
    Sha256::digest(body.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

/// Splits off the header, checks the magic word and the body hash, and
/// returns the header fields.
fn open<'a>(text: &'a str, magic: &str) -> Result<(HashMap<&'a str, &'a str>, &'a str)> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let mut words = header.split_whitespace();
    if words.next() != Some(magic) {
        return format_err(format!("expected a {magic} header"));
    }
    let mut fields = HashMap::new();
    for w in words {
        let Some((k, v)) = w.split_once('=') else {
            return format_err(format!("bad header field {w:?}"));
        };
        fields.insert(k, v);
    }
    match fields.get("sha256") {
        Some(&h) if h == digest(body) => Ok((fields, body)),
        Some(_) => format_err("content hash mismatch"),
        None => format_err("missing sha256 field"),
    }
}

fn field<T: std::str::FromStr>(fields: &HashMap<&str, &str>, key: &str) -> Result<T> {
    fields
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format(format!("missing or malformed field {key}")))
}

fn parse_ints<const N: usize>(line: &str) -> Result<[BigInt; N]> {
    let parts: Vec<BigInt> = line
        .split_whitespace()
        .map(|w| w.parse::<BigInt>().map_err(|_| Error::Format(format!("bad integer {w:?}"))))
        .collect::<Result<_>>()?;
    parts.try_into().map_err(|_| Error::Format(format!("expected {N} fields in {line:?}")))
}

fn rational(num: BigInt, den: BigInt) -> Result<BigRational> {
    if den <= BigInt::from(0) {
        return format_err("denominator must be positive");
    }
    Ok(BigRational::new(num, den))
}

pub fn qseries_to_string(weight: u32, f: &QSeries) -> String {
    let mut body = String::new();
    for (n, c) in f.coeffs().iter().enumerate() {
        let _ = writeln!(body, "{n} {} {}", c.numer(), c.denom());
    }
    format!("qseries-v1 weight={weight} precision={} sha256={}\n{body}", f.precision(), digest(&body))
}

/// Returns the weight and the series.
pub fn qseries_from_str(text: &str) -> Result<(u32, QSeries)> {
    let (fields, body) = open(text, "qseries-v1")?;
    let weight = field(&fields, "weight")?;
    let prec: usize = field(&fields, "precision")?;
    let mut coeffs = Vec::with_capacity(prec + 1);
    for (i, line) in body.lines().enumerate() {
        let [n, num, den] = parse_ints::<3>(line)?;
        if n != BigInt::from(i) {
            return format_err(format!("line {} has index {n}", i + 2));
        }
        coeffs.push(rational(num, den)?);
    }
    if coeffs.len() != prec + 1 {
        return format_err(format!("expected {} coefficients, found {}", prec + 1, coeffs.len()));
    }
    Ok((weight, QSeries::from_coeffs(coeffs)))
}

pub fn siegel_to_string(f: &SiegelExpansion) -> String {
    let mut keys: Vec<&HalfIntMatrix> = f.coeffs().keys().collect();
    keys.sort_by_key(|t| (t.det4(), t.n, t.r));
    let mut body = String::new();
    if let Some(phi) = f.singular_part() {
        for (c, v) in phi.coeffs().iter().enumerate() {
            let _ = writeln!(body, "{c} 0 0 {} {}", v.numer(), v.denom());
        }
    }
    for t in keys {
        let v = &f.coeffs()[t];
        let _ = writeln!(body, "{} {} {} {} {}", t.n, t.r, t.m, v.numer(), v.denom());
    }
    let kind = if f.has_singular_part() { "eis" } else { "cusp" };
    format!(
        "siegel-v1 weight={} detmax4={} box={} kind={kind} sha256={}\n{body}",
        f.weight(),
        f.detmax4(),
        f.box_bound(),
        digest(&body)
    )
}

pub fn siegel_from_str(text: &str) -> Result<SiegelExpansion> {
    let (fields, body) = open(text, "siegel-v1")?;
    let weight = field(&fields, "weight")?;
    let detmax4 = field(&fields, "detmax4")?;
    let box_bound = field(&fields, "box")?;
    let eis = match fields.get("kind") {
        Some(&"eis") => true,
        Some(&"cusp") => false,
        _ => return format_err("kind must be cusp or eis"),
    };
    let mut phi = Vec::new();
    let mut coeffs = HashMap::new();
    for line in body.lines() {
        let [n, r, m, num, den] = parse_ints::<5>(line)?;
        let small = |x: &BigInt| i64::try_from(x).map_err(|_| Error::Format(format!("index {x} out of range")));
        let t = HalfIntMatrix::new(small(&n)?, small(&r)?, small(&m)?);
        let v = rational(num, den)?;
        if t.det4() == 0 {
            if !eis || t.r != 0 || t.m != 0 || t.n as usize != phi.len() {
                return format_err(format!("unexpected singular line {line:?}"));
            }
            phi.push(v);
        } else if coeffs.insert(t, v).is_some() {
            return format_err(format!("duplicate line for {t}"));
        }
    }
    let phi = if eis {
        if phi.is_empty() {
            return format_err("eis file without singular part");
        }
        Some(QSeries::from_coeffs(phi))
    } else {
        None
    };
    SiegelExpansion::from_parts(weight, detmax4, box_bound, coeffs, phi)
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn write_qseries(path: &Path, weight: u32, f: &QSeries) -> Result<()> {
    Ok(std::fs::write(path, qseries_to_string(weight, f))?)
}

pub fn read_qseries(path: &Path) -> Result<(u32, QSeries)> {
    qseries_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_siegel(path: &Path, f: &SiegelExpansion) -> Result<()> {
    Ok(std::fs::write(path, siegel_to_string(f))?)
}

pub fn read_siegel(path: &Path) -> Result<SiegelExpansion> {
    siegel_from_str(&std::fs::read_to_string(path)?)
}
