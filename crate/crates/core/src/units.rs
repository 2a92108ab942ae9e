//! Decibel conversions. All internal math is in linear units; these helpers
//! are only used where values enter from configuration files or the CLI.

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Parses a scalar that may carry a `dB` or `dBm` suffix.
///
/// `"-90 dBm"` becomes watts, `"10dB"` a linear ratio, and a bare number is
/// taken as already linear. `inf` is accepted for Rician factors.
pub fn parse_quantity(text: &str) -> Result<f64> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (num, conv): (&str, fn(f64) -> f64) = if let Some(v) = lower.strip_suffix("dbm") {
        (v, dbm_to_watts)
    } else if let Some(v) = lower.strip_suffix("db") {
        (v, db_to_linear)
    } else {
        (lower.as_str(), |x| x)
    };
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot read `{text}` as a number")))?;
    Ok(conv(value))
}
