//! Flat `key = value` scenario files.
//!
//! ```text
//! # microwave memory with a noisy pump
//! preset = teufel
//! frequency-convention = angular
//! GammaL = 1 kHz
//! gammac = 0.5 MHz
//! tau = 0.95 us
//! ```
//!
//! Rates take `Hz`, `kHz`, `MHz`, `GHz` (converted with the frequency
//! convention) or `rad/s`; bare numbers are rad/s. Times take `s`, `ms`,
//! `us`, `ns` and temperatures `K`, `mK`, `uK`. Later entries win, so command
//! line overrides are simply appended.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::presets::preset;
use super::units::{parse_quantity, Dimension, FrequencyConvention};
use crate::error::Error;
use crate::model::{
    fixed_points, select_fixed_point, thermal_occupation, NoiseMode, NoiseSpec, PhysicalParams,
};
use crate::protocol::{InputState, ProtocolSpec, Psi0Mode, RotationMode, StoreCoupling};

/// A fully resolved simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: PhysicalParams,
    pub input: InputState,
    pub protocol: ProtocolSpec,
    pub convention: FrequencyConvention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
    /// The configuration is well formed but has no stable operating point.
    pub unstable: bool,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.origin)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, ": {key}")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

impl From<ConfigError> for Error {
    fn from(e: ConfigError) -> Self {
        if e.unstable {
            Error::Unstable(e.to_string())
        } else {
            Error::Config(e.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: String,
    origin: String,
    line: Option<usize>,
}

impl Entry {
    fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError {
            unstable: false,
            origin: self.origin.clone(),
            line: self.line,
            key: Some(self.key.clone()),
            message: message.into(),
        }
    }
}

/// Unresolved entries in the order they were given.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: Vec<Entry>,
}

/// Every key understood by [`Config::resolve`].
pub const KEYS: &[&str] = &[
    "name",
    "preset",
    "frequency-convention",
    "omega_m",
    "kappa",
    "gamma",
    "Qm",
    "g0",
    "alpha_s",
    "G",
    "G_over_omega_m",
    "E_L",
    "Delta_0",
    "N_m",
    "N_C",
    "T",
    "noise",
    "GammaL",
    "gammac",
    "alpha",
    "alpha_im",
    "r",
    "cooled",
    "psi0",
    "t_s",
    "tau",
    "tau_omega_m",
    "rotation",
    "store-noise",
    "cooling-pulse",
];

fn canonical(key: &str) -> Option<&'static str> {
    let k = match key {
        "Gamma_L" | "gamma_l" => "GammaL",
        "gamma_c" => "gammac",
        "Q_m" => "Qm",
        "n_m" => "N_m",
        "n_c" => "N_C",
        "frequency_convention" => "frequency-convention",
        "store_noise" => "store-noise",
        "cooling_pulse" => "cooling-pulse",
        other => other,
    };
    KEYS.iter().copied().find(|&c| c == k)
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError {
                unstable: false,
                origin: origin.to_string(),
                line: Some(i + 1),
                key: None,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("key '{key}' has no value")));
            }
            let key = canonical(key).ok_or_else(|| err(format!("unknown key '{key}'")))?;
            cfg.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                origin: origin.to_string(),
                line: Some(i + 1),
            });
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            unstable: false,
            origin: origin.clone(),
            line: None,
            key: None,
            message: e.to_string(),
        })?;
        Self::parse(&text, &origin)
    }

    /// Appends an override, e.g. from a command line flag.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        let canon = canonical(key).ok_or_else(|| ConfigError {
            unstable: false,
            origin: "command line".into(),
            line: None,
            key: Some(key.to_string()),
            message: "unknown key".into(),
        })?;
        self.entries.push(Entry {
            key: canon.to_string(),
            value: value.into(),
            origin: "command line".into(),
            line: None,
        });
        Ok(())
    }

    /// Entries as `(key, value)` in order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .map(|e| (e.key.as_str(), e.value.as_str()))
    }

    fn last(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    /// The convention that applies: `forced`, else the file, else ordinary.
    pub fn convention(
        &self,
        forced: Option<FrequencyConvention>,
    ) -> Result<FrequencyConvention, ConfigError> {
        if let Some(c) = forced {
            return Ok(c);
        }
        match self.last("frequency-convention") {
            Some(e) => e.value.parse().map_err(|m: String| e.error(m)),
            None => Ok(FrequencyConvention::default()),
        }
    }

    pub fn resolve(&self, forced: Option<FrequencyConvention>) -> Result<Scenario, ConfigError> {
        let convention = self.convention(forced)?;
        let mut sc = match self.last("preset") {
            Some(e) => preset(&e.value)
                .map(|p| p.scenario)
                .ok_or_else(|| e.error(format!("unknown preset '{}'", e.value)))?,
            None => blank(),
        };
        sc.convention = convention;

        // Keys that depend on others are applied after the plain ones.
        let mut qm = None;
        let mut temp = None;
        let mut coupling = None;
        let mut coupling_ratio = None;
        let mut drive = None;
        let mut detuning = None;
        let mut tau_scaled = None;
        let mut noise_mode = None;
        let mut gammac_given = None;

        for e in &self.entries {
            let rate =
                || parse_quantity(&e.value, Dimension::Rate, convention).map_err(|m| e.error(m));
            let time =
                || parse_quantity(&e.value, Dimension::Time, convention).map_err(|m| e.error(m));
            let number = || {
                parse_quantity(&e.value, Dimension::Dimensionless, convention)
                    .map_err(|m| e.error(m))
            };
            let p = &mut sc.params;
            match e.key.as_str() {
                "name" => sc.name = e.value.clone(),
                "preset" | "frequency-convention" => {}
                "omega_m" => p.omega_m = rate()?,
                "kappa" => p.kappa = rate()?,
                "gamma" => {
                    p.gamma = rate()?;
                    qm = None;
                }
                "Qm" => qm = Some((number()?, e)),
                "g0" => p.g0 = rate()?,
                "alpha_s" => {
                    p.alpha_s = number()?;
                    coupling = None;
                    coupling_ratio = None;
                }
                "G" => {
                    coupling = Some((rate()?, e));
                    coupling_ratio = None;
                }
                "G_over_omega_m" => {
                    coupling_ratio = Some((number()?, e));
                    coupling = None;
                }
                "E_L" => drive = Some((rate()?, e)),
                "Delta_0" => detuning = Some(rate()?),
                "N_m" => {
                    p.n_m = number()?;
                    temp = None;
                }
                "N_C" => p.n_c = number()?,
                "T" => {
                    temp = Some((
                        parse_quantity(&e.value, Dimension::Temperature, convention)
                            .map_err(|m| e.error(m))?,
                        e,
                    ))
                }
                "noise" => noise_mode = Some(parse_enum::<NoiseModeArg>(e)?.0),
                "GammaL" => p.noise.gamma_l = rate()?,
                "gammac" => {
                    let v = rate()?;
                    p.noise.gamma_c = v;
                    gammac_given = Some((v, e));
                }
                "alpha" => sc.input.alpha.re = number()?,
                "alpha_im" => sc.input.alpha.im = number()?,
                "r" => sc.input.r = number()?,
                "cooled" => sc.input.mechanical_cooled = parse_bool(e)?,
                "psi0" => sc.input.psi0 = parse_enum::<Psi0Arg>(e)?.0,
                "t_s" => sc.protocol.t_s = Some(time()?),
                "tau" => {
                    sc.protocol.tau = time()?;
                    tau_scaled = None;
                }
                "tau_omega_m" => tau_scaled = Some(number()?),
                "rotation" => sc.protocol.rotation = parse_enum::<RotationArg>(e)?.0,
                "store-noise" => sc.protocol.store_coupling = parse_enum::<StoreArg>(e)?.0,
                "cooling-pulse" => sc.protocol.cooling_pre_pulse = parse_bool(e)?,
                other => unreachable!("key {other} passed canonicalization"),
            }
        }

        let p = &mut sc.params;
        let origin_err = |message: String| ConfigError {
            unstable: false,
            origin: self
                .entries
                .last()
                .map(|e| e.origin.clone())
                .unwrap_or_else(|| "config".into()),
            line: None,
            key: None,
            message,
        };
        if !(p.omega_m.is_finite() && p.omega_m > 0.0) {
            return Err(ConfigError {
                unstable: false,
                key: Some("omega_m".into()),
                ..origin_err("omega_m > 0 is required (set it or pick a preset)".into())
            });
        }
        if let Some((q, e)) = qm {
            if q.is_nan() || q <= 0.0 {
                return Err(e.error("Qm must be > 0"));
            }
            p.gamma = p.omega_m / q;
        }
        if let Some((t, e)) = temp {
            p.n_m = thermal_occupation(t, p.omega_m).map_err(|m| e.error(m.to_string()))?;
        }
        if let Some(x) = tau_scaled {
            sc.protocol.tau = x / p.omega_m;
        }

        // Noise mode: explicit choice, else implied by a nonzero linewidth.
        let mode = match noise_mode {
            Some(m) => m,
            None if p.noise.mode == NoiseMode::NoNoise && p.noise.gamma_l > 0.0 => {
                NoiseMode::Colored
            }
            None => p.noise.mode,
        };
        if mode == NoiseMode::WhiteExact {
            if let Some((v, e)) = gammac_given {
                if v != 0.0 {
                    return Err(e.error("a finite gammac contradicts noise = white-exact"));
                }
            }
            p.noise.gamma_c = 0.0;
        }
        p.noise.mode = mode;

        if let Some((g, e)) = coupling {
            *p = p.with_coupling(g).map_err(|m| e.error(strip(m)))?;
        } else if let Some((x, e)) = coupling_ratio {
            *p = p
                .with_coupling(x * p.omega_m)
                .map_err(|m| e.error(strip(m)))?;
        } else if let Some((e_l, e)) = drive {
            let delta = detuning.unwrap_or(p.omega_m);
            let roots = fixed_points(p, e_l, delta).map_err(|m| e.error(strip(m)))?;
            let fp = select_fixed_point(&roots).map_err(|m| {
                let unstable = matches!(m, Error::Unstable(_));
                ConfigError {
                    unstable,
                    ..e.error(strip(m))
                }
            })?;
            p.alpha_s = fp.alpha_s();
        }

        sc.params.validate().map_err(|m| origin_err(strip(m)))?;
        sc.input.validate().map_err(|m| origin_err(strip(m)))?;
        sc.protocol.validate().map_err(|m| origin_err(strip(m)))?;
        Ok(sc)
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Domain(m)
        | Error::Config(m)
        | Error::Unstable(m)
        | Error::Degenerate(m)
        | Error::Numerical(m) => m,
    }
}

/// Placeholder scenario for configs that build everything from scratch.
fn blank() -> Scenario {
    Scenario {
        name: "custom".into(),
        params: PhysicalParams {
            omega_m: f64::NAN,
            kappa: 0.0,
            gamma: 0.0,
            g0: 0.0,
            alpha_s: 0.0,
            n_m: 0.0,
            n_c: 0.0,
            noise: NoiseSpec::none(),
        },
        input: InputState::coherent(1.0),
        protocol: ProtocolSpec::with_storage(0.0),
        convention: FrequencyConvention::default(),
    }
}

fn parse_bool(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(e.error(format!("expected true or false, got '{}'", e.value))),
    }
}

fn parse_enum<T: FromStr<Err = String>>(e: &Entry) -> Result<T, ConfigError> {
    e.value.parse().map_err(|m| e.error(m))
}

macro_rules! keyword {
    ($name:ident, $target:ty, $what:literal, { $($word:literal => $val:expr),+ $(,)? }) => {
        pub struct $name(pub $target);
        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($word => Ok($name($val)),)+
                    other => Err(format!(concat!("unknown ", $what, " '{}' (expected one of: {})"),
                        other, [$($word),+].join(", "))),
                }
            }
        }
    };
}

keyword!(NoiseModeArg, NoiseMode, "noise mode", {
    "colored" => NoiseMode::Colored,
    "white-exact" => NoiseMode::WhiteExact,
    "none" => NoiseMode::NoNoise,
});
keyword!(Psi0Arg, Psi0Mode, "psi0 mode", {
    "paper" => Psi0Mode::PaperQuarter,
    "stationary" => Psi0Mode::Stationary,
});
keyword!(RotationArg, RotationMode, "rotation mode", {
    "fixed" => RotationMode::FixedTotalTime,
    "optimize" => RotationMode::NumericOptimize,
});
keyword!(StoreArg, StoreCoupling, "store-noise mode", {
    "retained" => StoreCoupling::Retained,
    "decoupled" => StoreCoupling::Decoupled,
});

fn word<T: Copy + PartialEq>(table: &[(&'static str, T)], v: T) -> &'static str {
    table
        .iter()
        .find(|(_, t)| *t == v)
        .map(|(w, _)| *w)
        .unwrap_or("?")
}

impl Scenario {
    /// Canonical config text: rates in rad/s, times in seconds. Parsing it
    /// back reproduces the scenario exactly, whatever the convention.
    pub fn dump(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("name", self.name.clone());
        kv("frequency-convention", self.convention.to_string());
        kv("omega_m", format!("{} rad/s", p.omega_m));
        kv("kappa", format!("{} rad/s", p.kappa));
        kv("gamma", format!("{} rad/s", p.gamma));
        kv("g0", format!("{} rad/s", p.g0));
        kv("alpha_s", format!("{}", p.alpha_s));
        kv("N_m", format!("{}", p.n_m));
        kv("N_C", format!("{}", p.n_c));
        let noise = word(
            &[
                ("colored", NoiseMode::Colored),
                ("white-exact", NoiseMode::WhiteExact),
                ("none", NoiseMode::NoNoise),
            ],
            p.noise.mode,
        );
        kv("noise", noise.into());
        kv("GammaL", format!("{} rad/s", p.noise.gamma_l));
        kv("gammac", format!("{} rad/s", p.noise.gamma_c));
        kv("alpha", format!("{}", self.input.alpha.re));
        kv("alpha_im", format!("{}", self.input.alpha.im));
        kv("r", format!("{}", self.input.r));
        kv("cooled", format!("{}", self.input.mechanical_cooled));
        kv(
            "psi0",
            word(
                &[
                    ("paper", Psi0Mode::PaperQuarter),
                    ("stationary", Psi0Mode::Stationary),
                ],
                self.input.psi0,
            )
            .into(),
        );
        if let Some(t) = self.protocol.t_s {
            kv("t_s", format!("{t} s"));
        }
        kv("tau", format!("{} s", self.protocol.tau));
        kv(
            "rotation",
            word(
                &[
                    ("fixed", RotationMode::FixedTotalTime),
                    ("optimize", RotationMode::NumericOptimize),
                ],
                self.protocol.rotation,
            )
            .into(),
        );
        kv(
            "store-noise",
            word(
                &[
                    ("retained", StoreCoupling::Retained),
                    ("decoupled", StoreCoupling::Decoupled),
                ],
                self.protocol.store_coupling,
            )
            .into(),
        );
        kv(
            "cooling-pulse",
            format!("{}", self.protocol.cooling_pre_pulse),
        );
        out.push_str(&format!(
            "# derived: Qm = {}, G = {} rad/s, G/omega_m = {}, tau*omega_m = {}\n",
            p.quality_factor(),
            p.coupling(),
            p.coupling() / p.omega_m,
            self.protocol.tau * p.omega_m
        ));
        out
    }

    /// Sets the input amplitude to a real `alpha`.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.input.alpha = Complex64::new(alpha, 0.0);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_reports_line() {
        let err = Config::parse("preset = teufel\n\nkapa = 1 kHz\n", "x.cfg").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.to_string().contains("x.cfg:3"), "{err}");
        assert!(err.message.contains("kapa"));
    }

    #[test]
    fn bad_value_names_the_field() {
        let cfg = Config::parse("preset = teufel\ntau = 3 kHz\n", "x.cfg").unwrap();
        let err = cfg.resolve(None).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("tau"));
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn missing_omega_without_preset() {
        let cfg = Config::parse("kappa = 1 kHz", "x").unwrap();
        assert!(cfg.resolve(None).is_err());
    }

    #[test]
    fn white_exact_with_cutoff_is_rejected() {
        let cfg = Config::parse(
            "preset = teufel\nnoise = white-exact\nGammaL = 1kHz\ngammac = 1MHz\n",
            "x",
        )
        .unwrap();
        let err = cfg.resolve(None).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("gammac"));
    }

    #[test]
    fn linewidth_switches_noise_on() {
        let cfg = Config::parse("preset = teufel\nGammaL = 1kHz\ngammac = 0.5MHz", "x").unwrap();
        let sc = cfg.resolve(Some(FrequencyConvention::Angular)).unwrap();
        assert_eq!(sc.params.noise.mode, NoiseMode::Colored);
        assert_eq!(sc.params.noise.gamma_l, 1000.0);
        assert_eq!(sc.params.noise.gamma_c, 5e5);
    }

    #[test]
    fn derived_keys() {
        let mut cfg = Config::parse("preset = teufel", "x").unwrap();
        cfg.set("Qm", "1e4").unwrap();
        cfg.set("G_over_omega_m", "0.03").unwrap();
        cfg.set("tau_omega_m", "10").unwrap();
        let sc = cfg.resolve(None).unwrap();
        let p = sc.params;
        assert!((p.quality_factor() - 1e4).abs() < 1e-6);
        assert!((p.coupling() / p.omega_m - 0.03).abs() < 1e-12);
        assert!((sc.protocol.tau * p.omega_m - 10.0).abs() < 1e-12);
    }

    #[test]
    fn dump_round_trips() {
        let mut cfg = Config::parse(
            "preset = groblacher\nGammaL = 1 kHz\ngammac = 7 kHz\nr = 0.3",
            "x",
        )
        .unwrap();
        cfg.set("rotation", "optimize").unwrap();
        let sc = cfg.resolve(None).unwrap();
        let text = sc.dump();
        for forced in [None, Some(FrequencyConvention::Angular)] {
            let again = Config::parse(&text, "dump")
                .unwrap()
                .resolve(forced)
                .unwrap();
            assert_eq!(again.params, sc.params);
            assert_eq!(again.input, sc.input);
            assert_eq!(again.protocol, sc.protocol);
        }
    }
}
