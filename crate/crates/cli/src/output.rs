use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

pub const DIGITS: usize = 12;

/// `%.12g`-style rendering.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.to_string() }
}

/// Rounds to 12 significant digits so JSON numbers match the CSV text.
pub fn round(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

pub fn round_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| round(x)).collect()
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `out`, or to standard output when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
