//! Quantities with unit suffixes: `1kHz`, `0.95 us`, `1.7mK`, `6283.2 rad/s`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

/// How a frequency written in Hz becomes a rate in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FrequencyConvention {
    /// `f` Hz means `2πf` rad/s.
    #[default]
    Ordinary,
    /// `f` Hz means `f` rad/s.
    Angular,
}

impl FrequencyConvention {
    pub fn factor(self) -> f64 {
        match self {
            FrequencyConvention::Ordinary => TAU,
            FrequencyConvention::Angular => 1.0,
        }
    }
}

impl FromStr for FrequencyConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ordinary" => Ok(Self::Ordinary),
            "angular" => Ok(Self::Angular),
            other => Err(format!(
                "unknown frequency convention '{other}' (ordinary|angular)"
            )),
        }
    }
}

impl fmt::Display for FrequencyConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ordinary => "ordinary",
            Self::Angular => "angular",
        })
    }
}

/// Physical dimension a key expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Result in rad/s. Bare numbers are rad/s.
    Rate,
    /// Result in seconds. Bare numbers are seconds.
    Time,
    /// Result in kelvin. Bare numbers are kelvin.
    Temperature,
    Dimensionless,
}

/// Splits `"0.5MHz"` / `"0.5 MHz"` into number and suffix.
fn split(raw: &str) -> Result<(f64, &str), String> {
    let s = raw.trim();
    let end = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && s[i + 1..]
                        .chars()
                        .next()
                        .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(end);
    let value: f64 = num
        .parse()
        .map_err(|_| format!("'{raw}' does not start with a number"))?;
    Ok((value, unit.trim()))
}

/// Parses a quantity and converts it to the base unit of `dim`.
pub fn parse_quantity(
    raw: &str,
    dim: Dimension,
    convention: FrequencyConvention,
) -> Result<f64, String> {
    let (value, unit) = split(raw)?;
    let scale = match (dim, unit) {
        (_, "") => 1.0,
        (Dimension::Rate, "rad/s") | (Dimension::Rate, "/s") | (Dimension::Rate, "s^-1") => 1.0,
        (Dimension::Rate, "Hz") => convention.factor(),
        (Dimension::Rate, "kHz") => 1e3 * convention.factor(),
        (Dimension::Rate, "MHz") => 1e6 * convention.factor(),
        (Dimension::Rate, "GHz") => 1e9 * convention.factor(),
        (Dimension::Time, "s") => 1.0,
        (Dimension::Time, "ms") => 1e-3,
        (Dimension::Time, "us") | (Dimension::Time, "µs") => 1e-6,
        (Dimension::Time, "ns") => 1e-9,
        (Dimension::Temperature, "K") => 1.0,
        (Dimension::Temperature, "mK") => 1e-3,
        (Dimension::Temperature, "uK") | (Dimension::Temperature, "µK") => 1e-6,
        (d, u) => return Err(format!("unit '{u}' does not fit a {d:?} value")),
    };
    let v = value * scale;
    if !v.is_finite() {
        return Err(format!("'{raw}' is not finite"));
    }
    Ok(v)
}
