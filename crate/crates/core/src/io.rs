//! Versioned solution files with exact hexadecimal floating-point encoding,
//! and atomic file replacement.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Parameters, ReducedState};
use crate::strip::{ModeBasis, SurfaceTrace};

pub const SCHEMA_VERSION: u32 = 1;

const MANTISSA_BITS: u32 = 52;
const MANTISSA_MASK: u64 = (1 << MANTISSA_BITS) - 1;
const EXPONENT_BIAS: i64 = 1023;

/// Formats a finite `f64` as `[-]0x1.<hex>p<exp>` (or `0x0.<hex>p-1022` when
/// subnormal) with trailing zero digits removed.
pub fn format_hex(value: f64) -> Result<String> {
    if !value.is_finite() {
        return Err(Error::Format(format!("cannot encode non-finite value {value}")));
    }
    let bits = value.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> MANTISSA_BITS) & 0x7ff) as i64;
    let mantissa = bits & MANTISSA_MASK;
    if biased == 0 && mantissa == 0 {
        return Ok(format!("{sign}0x0p+0"));
    }
    let (lead, exp) = if biased == 0 {
        (0, 1 - EXPONENT_BIAS)
    } else {
        (1, biased - EXPONENT_BIAS)
    };
    let digits = format!("{mantissa:013x}");
    let digits = digits.trim_end_matches('0');
    let frac = if digits.is_empty() {
        String::new()
    } else {
        format!(".{digits}")
    };
    let exp_sign = if exp >= 0 { "+" } else { "-" };
    Ok(format!("{sign}0x{lead}{frac}p{exp_sign}{}", exp.abs()))
}

/// Inverse of [`format_hex`]; accepts only the forms it produces.
pub fn parse_hex(text: &str) -> Result<f64> {
    let bad = || Error::Format(format!("malformed hex float {text:?}"));
    let (negative, rest) = match text.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, text),
    };
    let rest = rest.strip_prefix("0x").ok_or_else(bad)?;
    let (significand, exponent) = rest.split_once('p').ok_or_else(bad)?;
    let exp: i64 = exponent.parse().map_err(|_| bad())?;
    let (lead, frac) = match significand.split_once('.') {
        Some((l, f)) if !f.is_empty() && f.len() <= 13 => (l, f),
        Some(_) => return Err(bad()),
        None => (significand, ""),
    };
    if !frac.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(bad());
    }
    let mantissa = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(&format!("{frac:0<13}"), 16).map_err(|_| bad())?
    };
    let magnitude = match lead {
        "1" => {
            let biased = exp + EXPONENT_BIAS;
            if !(1..=2046).contains(&biased) {
                return Err(bad());
            }
            ((biased as u64) << MANTISSA_BITS) | mantissa
        }
        "0" if mantissa == 0 && exp == 0 => 0,
        "0" if exp == 1 - EXPONENT_BIAS && mantissa != 0 => mantissa,
        _ => return Err(bad()),
    };
    let sign = if negative { 1u64 << 63 } else { 0 };
    Ok(f64::from_bits(sign | magnitude))
}

/// On-disk form of a [`ReducedState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub gamma: String,
    pub alpha: String,
    pub half_period: String,
    pub mode_count: usize,
    pub coeffs: Vec<String>,
}

impl SolutionFile {
    pub fn from_state(state: &ReducedState) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            gamma: format_hex(state.params.gamma)?,
            alpha: format_hex(state.params.alpha)?,
            half_period: format_hex(state.basis.half_period())?,
            mode_count: state.basis.mode_count(),
            coeffs: state
                .w1
                .coeffs()
                .iter()
                .map(|&c| format_hex(c))
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_state(&self) -> Result<ReducedState> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let basis = ModeBasis::new(parse_hex(&self.half_period)?, self.mode_count)?;
        let params = Parameters::new(parse_hex(&self.gamma)?, parse_hex(&self.alpha)?)?;
        let coeffs = self.coeffs.iter().map(|c| parse_hex(c)).collect::<Result<Vec<_>>>()?;
        ReducedState::new(basis, params, SurfaceTrace::new(&basis, coeffs)?)
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn write_solution(path: &Path, state: &ReducedState) -> Result<()> {
    let file = SolutionFile::from_state(state)?;
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_solution(path: &Path) -> Result<ReducedState> {
    let text = fs::read_to_string(path)?;
    let file: SolutionFile = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    file.to_state()
}
