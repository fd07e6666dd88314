//! Two-line element sets in the standard fixed-column format.

use chrono::{DateTime, Duration, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const LINE_LEN: usize = 69;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TleError {
    #[error("line {line}: expected {LINE_LEN} characters, got {len}")]
    Length { line: u8, len: usize },
    #[error("line {line}: checksum mismatch (expected {expected}, found {found})")]
    Checksum { line: u8, expected: u8, found: char },
    #[error("line {line}: bad line number marker")]
    LineNumber { line: u8 },
    #[error("line {line}: cannot parse field `{field}` from {raw:?}")]
    Field {
        line: u8,
        field: &'static str,
        raw: String,
    },
    #[error("catalog numbers differ between lines ({line1} vs {line2})")]
    CatalogMismatch { line1: u32, line2: u32 },
    #[error("{field} out of range: {value}")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("empty TLE line")]
    Empty,
}

impl TleError {
    pub fn code(&self) -> &'static str {
        match self {
            TleError::Length { .. } => "TLE_LENGTH",
            TleError::Checksum { .. } => "TLE_CHECKSUM",
            TleError::LineNumber { .. } => "TLE_LINE_NUMBER",
            TleError::Field { .. } => "TLE_FIELD",
            TleError::CatalogMismatch { .. } => "TLE_CATALOG_MISMATCH",
            TleError::OutOfRange { .. } => "TLE_OUT_OF_RANGE",
            TleError::Empty => "TLE_EMPTY",
        }
    }
}

/// Mean orbital elements at epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tle {
    pub name: Option<String>,
    pub catalog_number: u32,
    pub epoch: DateTime<Utc>,
    /// degrees
    pub inclination: f64,
    /// degrees
    pub raan: f64,
    pub eccentricity: f64,
    /// degrees
    pub arg_perigee: f64,
    /// degrees
    pub mean_anomaly: f64,
    /// revolutions per day
    pub mean_motion: f64,
    /// 1 / earth radii
    pub bstar: f64,
    pub line1: String,
    pub line2: String,
}

/// Modulo-10 checksum over the first 68 columns: digits count at face value,
/// each minus sign counts one.
pub fn tle_checksum(line: &str) -> u8 {
    let sum: u32 = line
        .chars()
        .take(LINE_LEN - 1)
        .map(|c| match c {
            '0'..='9' => c as u32 - '0' as u32,
            '-' => 1,
            _ => 0,
        })
        .sum();
    (sum % 10) as u8
}

fn check_line(line: &str, n: u8) -> Result<(), TleError> {
    if line.is_empty() {
        return Err(TleError::Empty);
    }
    if !line.is_ascii() || line.len() != LINE_LEN {
        return Err(TleError::Length {
            line: n,
            len: line.chars().count(),
        });
    }
    let expected = tle_checksum(line);
    let found = line.as_bytes()[LINE_LEN - 1] as char;
    if found.to_digit(10) != Some(expected as u32) {
        return Err(TleError::Checksum {
            line: n,
            expected,
            found,
        });
    }
    if line.as_bytes()[0] != b'0' + n || line.as_bytes()[1] != b' ' {
        return Err(TleError::LineNumber { line: n });
    }
    Ok(())
}

/// 1-indexed inclusive column range, trimmed.
fn cols(line: &str, from: usize, to: usize) -> &str {
    line[from - 1..to].trim()
}

fn num<T: std::str::FromStr>(
    line: &str,
    n: u8,
    from: usize,
    to: usize,
    field: &'static str,
) -> Result<T, TleError> {
    let raw = cols(line, from, to);
    raw.parse().map_err(|_| TleError::Field {
        line: n,
        field,
        raw: raw.to_string(),
    })
}

/// Parses the assumed-decimal exponent notation, e.g. ` 30306-3` → 0.30306e-3.
fn exp_field(
    line: &str,
    n: u8,
    from: usize,
    to: usize,
    field: &'static str,
) -> Result<f64, TleError> {
    let raw = cols(line, from, to);
    let bad = || TleError::Field {
        line: n,
        field,
        raw: raw.to_string(),
    };
    if raw.is_empty() {
        return Ok(0.0);
    }
    let (sign, body) = match raw.as_bytes()[0] {
        b'-' => (-1.0, &raw[1..]),
        b'+' => (1.0, &raw[1..]),
        _ => (1.0, raw),
    };
    let split = body.rfind(['-', '+']).ok_or_else(bad)?;
    if split == 0 {
        return Err(bad());
    }
    let mantissa: f64 = format!("0.{}", &body[..split]).parse().map_err(|_| bad())?;
    let exponent: i32 = body[split..].parse().map_err(|_| bad())?;
    Ok(sign * mantissa * 10f64.powi(exponent))
}

fn epoch_from(year2: u32, day: f64) -> Option<DateTime<Utc>> {
    let year = if year2 < 57 {
        2000 + year2
    } else {
        1900 + year2
    } as i32;
    let jan1 = Utc.with_ymd_and_hms(year, 1, 1, 0, 0, 0).single()?;
    let ms = ((day - 1.0) * 86_400_000.0).round() as i64;
    Some(jan1 + Duration::milliseconds(ms))
}

pub fn parse_tle(line1: &str, line2: &str) -> Result<Tle, TleError> {
    let line1 = line1.trim_end_matches(['\r', '\n']);
    let line2 = line2.trim_end_matches(['\r', '\n']);
    check_line(line1, 1)?;
    check_line(line2, 2)?;

    let cat1: u32 = num(line1, 1, 3, 7, "catalog_number")?;
    let cat2: u32 = num(line2, 2, 3, 7, "catalog_number")?;
    if cat1 != cat2 {
        return Err(TleError::CatalogMismatch {
            line1: cat1,
            line2: cat2,
        });
    }

    let year2: u32 = num(line1, 1, 19, 20, "epoch_year")?;
    let day: f64 = num(line1, 1, 21, 32, "epoch_day")?;
    if !(1.0..367.0).contains(&day) {
        return Err(TleError::OutOfRange {
            field: "epoch_day",
            value: day,
        });
    }
    let epoch = epoch_from(year2, day).ok_or(TleError::Field {
        line: 1,
        field: "epoch",
        raw: cols(line1, 19, 32).to_string(),
    })?;
    let bstar = exp_field(line1, 1, 54, 61, "bstar")?;

    let inclination: f64 = num(line2, 2, 9, 16, "inclination")?;
    let raan: f64 = num(line2, 2, 18, 25, "raan")?;
    let ecc_raw = cols(line2, 27, 33);
    if ecc_raw.is_empty() || !ecc_raw.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TleError::Field {
            line: 2,
            field: "eccentricity",
            raw: ecc_raw.to_string(),
        });
    }
    let eccentricity: f64 = format!("0.{ecc_raw}").parse().unwrap();
    let arg_perigee: f64 = num(line2, 2, 35, 42, "arg_perigee")?;
    let mean_anomaly: f64 = num(line2, 2, 44, 51, "mean_anomaly")?;
    let mean_motion: f64 = num(line2, 2, 53, 63, "mean_motion")?;

    if !(0.0..=180.0).contains(&inclination) {
        return Err(TleError::OutOfRange {
            field: "inclination",
            value: inclination,
        });
    }
    if mean_motion <= 0.0 {
        return Err(TleError::OutOfRange {
            field: "mean_motion",
            value: mean_motion,
        });
    }

    Ok(Tle {
        name: None,
        catalog_number: cat1,
        epoch,
        inclination,
        raan,
        eccentricity,
        arg_perigee,
        mean_anomaly,
        mean_motion,
        bstar,
        line1: line1.to_string(),
        line2: line2.to_string(),
    })
}

fn with_checksum(mut body: String) -> String {
    debug_assert_eq!(body.len(), LINE_LEN - 1);
    let c = tle_checksum(&body);
    body.push((b'0' + c) as char);
    body
}

fn exp_notation(v: f64) -> String {
    if v == 0.0 {
        return " 00000-0".to_string();
    }
    let sign = if v < 0.0 { '-' } else { ' ' };
    let mut exp = v.abs().log10().floor() as i32 + 1;
    let mut mant = (v.abs() / 10f64.powi(exp) * 1e5).round() as u32;
    if mant >= 100_000 {
        mant /= 10;
        exp += 1;
    }
    let esign = if exp < 0 { '-' } else { '+' };
    format!("{sign}{mant:05}{esign}{}", exp.abs())
}

impl Tle {
    /// Builds a TLE from elements, rendering both lines with valid checksums.
    /// Values are rounded to the column precision of the format.
    #[allow(clippy::too_many_arguments)]
    pub fn from_elements(
        catalog_number: u32,
        epoch: DateTime<Utc>,
        inclination: f64,
        raan: f64,
        eccentricity: f64,
        arg_perigee: f64,
        mean_anomaly: f64,
        mean_motion: f64,
        bstar: f64,
    ) -> Result<Tle, TleError> {
        use chrono::Datelike;
        let jan1 = Utc.with_ymd_and_hms(epoch.year(), 1, 1, 0, 0, 0).unwrap();
        let day = 1.0 + (epoch - jan1).num_milliseconds() as f64 / 86_400_000.0;
        let yy = epoch.year().rem_euclid(100);
        let l1 = format!(
            "1 {catalog_number:05}U 00000A   {yy:02}{day:012.8}  .00000000  00000-0 {} 0  999",
            exp_notation(bstar)
        );
        let ecc = format!("{:07}", (eccentricity * 1e7).round() as u64);
        let l2 = format!(
            "2 {catalog_number:05} {inclination:8.4} {raan:8.4} {ecc} {arg_perigee:8.4} {mean_anomaly:8.4} {mean_motion:11.8}   10"
        );
        parse_tle(&with_checksum(l1), &with_checksum(l2))
    }
}

/// Parses a 2-line set, or a 3-line set whose first line is the satellite
/// name (an optional leading `0 ` is dropped). Blank lines are ignored.
pub fn parse_tle_set(text: &str) -> Result<Tle, TleError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end())
        .filter(|l| !l.is_empty())
        .collect();
    match lines.as_slice() {
        [l1, l2] => parse_tle(l1, l2),
        [name, l1, l2] => {
            let name = name.strip_prefix("0 ").unwrap_or(name).trim();
            let mut tle = parse_tle(l1, l2)?;
            tle.name = (!name.is_empty()).then(|| name.to_string());
            Ok(tle)
        }
        [] => Err(TleError::Empty),
        [first, ..] => Err(TleError::Length {
            line: 1,
            len: first.len(),
        }),
    }
}
