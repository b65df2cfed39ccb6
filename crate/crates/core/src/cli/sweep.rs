//! Parameter sweeps, the canned figure bundles and their CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use super::config::{Config, ConfigError, Scenario};
use super::units::{Dimension, FrequencyConvention};
use crate::error::Result;
use crate::model::{thermal_occupation, NoiseMode};
use crate::protocol::{evaluate, ProtocolOutcome, Psi0Mode, RotationMode, StoreCoupling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Varies `γ = ω_m/Q_m` with `ω_m` fixed.
    Qm,
    GammaL,
    GammaC,
    G,
    Tau,
    R,
    /// Bath temperature, mapped to `N_m` through the Bose factor at `ω_m`.
    T,
}

impl SweepAxis {
    pub fn dimension(self) -> Dimension {
        match self {
            SweepAxis::Qm | SweepAxis::R => Dimension::Dimensionless,
            SweepAxis::GammaL | SweepAxis::GammaC | SweepAxis::G => Dimension::Rate,
            SweepAxis::Tau => Dimension::Time,
            SweepAxis::T => Dimension::Temperature,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Qm => "Qm",
            SweepAxis::GammaL => "GammaL",
            SweepAxis::GammaC => "gammac",
            SweepAxis::G => "G",
            SweepAxis::Tau => "tau",
            SweepAxis::R => "r",
            SweepAxis::T => "T",
        }
    }

    /// Puts `value` (base units) into the scenario. A white-exact scenario
    /// has no cutoff, so a `gammac` value leaves it untouched.
    pub fn apply(self, value: f64, sc: &mut Scenario) -> Result<()> {
        let p = &mut sc.params;
        match self {
            SweepAxis::Qm => p.gamma = p.omega_m / value,
            SweepAxis::GammaL => {
                p.noise.gamma_l = value;
                if p.noise.mode == NoiseMode::NoNoise && value > 0.0 {
                    p.noise.mode = NoiseMode::Colored;
                }
            }
            SweepAxis::GammaC => {
                if p.noise.mode != NoiseMode::WhiteExact {
                    p.noise.gamma_c = value;
                }
            }
            SweepAxis::G => *p = p.with_coupling(value)?,
            SweepAxis::Tau => sc.protocol.tau = value,
            SweepAxis::R => sc.input.r = value,
            SweepAxis::T => p.n_m = thermal_occupation(value, p.omega_m)?,
        }
        Ok(())
    }
}

impl FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "Qm" | "Q_m" => SweepAxis::Qm,
            "GammaL" | "Gamma_L" => SweepAxis::GammaL,
            "gammac" | "gamma_c" => SweepAxis::GammaC,
            "G" => SweepAxis::G,
            "tau" => SweepAxis::Tau,
            "r" => SweepAxis::R,
            "T" => SweepAxis::T,
            other => {
                return Err(format!(
                    "unknown sweep axis '{other}' (Qm, GammaL, gammac, G, tau, r, T)"
                ))
            }
        })
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(format!("unknown spacing '{other}' (linear|log)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepRange {
    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.points < 2 {
            return Err(format!(
                "a sweep needs at least 2 points, got {}",
                self.points
            ));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.start >= self.stop {
            return Err(format!(
                "sweep needs start < stop, got {} .. {}",
                self.start, self.stop
            ));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return Err("log spacing needs start > 0".into());
        }
        Ok(())
    }

    /// Ascending points; the endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.stop;
                }
                let u = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + u * (self.stop - self.start),
                    Spacing::Log => {
                        (self.start.ln() + u * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

/// One curve: a base configuration, fixed overrides on top of it, and the
/// axis that varies.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub label: String,
    pub axis: SweepAxis,
    pub range: SweepRange,
    pub overrides: Vec<(String, String)>,
}

impl SweepSpec {
    /// Base config with this curve's overrides appended.
    pub fn config(&self, base: &Config) -> std::result::Result<Config, ConfigError> {
        let mut cfg = base.clone();
        for (k, v) in &self.overrides {
            cfg.set(k, v.clone())?;
        }
        Ok(cfg)
    }
}

/// A bundle of curves reproducing one figure panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub name: &'static str,
    pub description: &'static str,
    /// Convention under which the bundle's Hz values were calibrated.
    pub convention: FrequencyConvention,
    pub sweeps: Vec<SweepSpec>,
}

pub const FIGURE_NAMES: &[&str] = &[
    "fig3", "fig4a", "fig4b", "fig5", "fig6a", "fig6b", "fig7a", "fig7b", "fig8",
];

fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn curve(label: &str, axis: SweepAxis, range: SweepRange, pairs: &[(&str, &str)]) -> SweepSpec {
    SweepSpec {
        label: label.into(),
        axis,
        range,
        overrides: kv(pairs),
    }
}

/// Canned sweeps. Rates written in Hz go through `convention`.
pub fn figure(name: &str, convention: FrequencyConvention) -> Option<Figure> {
    use SweepAxis::*;
    let hz = |f: f64| f * convention.factor();
    let teufel_w = std::f64::consts::TAU * 10.69e6;
    let qm = SweepRange::log(1e3, 1e7, 41);
    let mw = [("preset", "teufel")];
    let with = |extra: &[(&'static str, &'static str)]| -> Vec<(&'static str, &'static str)> {
        mw.iter().chain(extra.iter()).copied().collect()
    };
    let (description, sweeps) = match name {
        "fig3" => (
            "microwave preset, F / n_h / lambda versus Qm",
            vec![
                curve("GammaL=0", Qm, qm, &with(&[("GammaL", "0")])),
                curve(
                    "GammaL=1kHz gammac=100kHz",
                    Qm,
                    qm,
                    &with(&[("GammaL", "1kHz"), ("gammac", "100kHz")]),
                ),
                curve(
                    "GammaL=1kHz gammac=0.5MHz",
                    Qm,
                    qm,
                    &with(&[("GammaL", "1kHz"), ("gammac", "0.5MHz")]),
                ),
                curve(
                    "GammaL=1kHz gammac=10MHz",
                    Qm,
                    qm,
                    &with(&[("GammaL", "1kHz"), ("gammac", "10MHz")]),
                ),
            ],
        ),
        "fig4a" => (
            "microwave preset, F versus GammaL at gammac = 0.5 MHz",
            vec![curve(
                "gammac=0.5MHz",
                GammaL,
                SweepRange::linear(0.0, hz(10e3), 41),
                &with(&[("gammac", "0.5MHz"), ("noise", "colored")]),
            )],
        ),
        "fig4b" => {
            let range = SweepRange::log(hz(1e3), hz(100e6), 41);
            let mut v: Vec<SweepSpec> = ["1kHz", "5kHz", "10kHz"]
                .iter()
                .map(|gl| {
                    let mut s = curve(
                        &format!("GammaL={gl}"),
                        GammaC,
                        range,
                        &with(&[("noise", "colored")]),
                    );
                    s.overrides.push(("GammaL".into(), gl.to_string()));
                    s
                })
                .collect();
            for gl in ["1kHz", "5kHz", "10kHz"] {
                let mut s = curve(
                    &format!("GammaL={gl} white-exact"),
                    GammaC,
                    range,
                    &with(&[("noise", "white-exact")]),
                );
                s.overrides.push(("GammaL".into(), gl.to_string()));
                v.push(s);
            }
            (
                "microwave preset, F versus gammac with the white-noise asymptotes",
                v,
            )
        }
        "fig5" => {
            let range = SweepRange::log(1e-6, 0.5e-3, 41);
            (
                "microwave preset, F versus storage time",
                vec![
                    curve(
                        "T=1.7mK GammaL=0",
                        Tau,
                        range,
                        &with(&[("T", "1.7mK"), ("GammaL", "0")]),
                    ),
                    curve(
                        "T=1.7mK GammaL=1kHz gammac=300kHz",
                        Tau,
                        range,
                        &with(&[("T", "1.7mK"), ("GammaL", "1kHz"), ("gammac", "300kHz")]),
                    ),
                    curve(
                        "T=0.01K GammaL=0",
                        Tau,
                        range,
                        &with(&[("T", "0.01K"), ("GammaL", "0")]),
                    ),
                    curve(
                        "T=0.01K GammaL=1kHz gammac=300kHz",
                        Tau,
                        range,
                        &with(&[("T", "0.01K"), ("GammaL", "1kHz"), ("gammac", "300kHz")]),
                    ),
                ],
            )
        }
        "fig6a" | "fig6b" => {
            let top = if name == "fig6a" { 0.05 } else { 1.0 };
            let points = if name == "fig6a" { 31 } else { 99 };
            let range = SweepRange::linear(0.02 * teufel_w, top * teufel_w, points);
            (
                if name == "fig6a" {
                    "microwave preset, F versus G from 0.02 to 0.05 omega_m"
                } else {
                    "microwave preset, F versus G from 0.02 to 1 omega_m"
                },
                vec![
                    curve("GammaL=0", G, range, &with(&[("GammaL", "0")])),
                    curve(
                        "GammaL=1kHz gammac=100kHz",
                        G,
                        range,
                        &with(&[("GammaL", "1kHz"), ("gammac", "100kHz")]),
                    ),
                    curve(
                        "GammaL=1kHz gammac=200kHz",
                        G,
                        range,
                        &with(&[("GammaL", "1kHz"), ("gammac", "200kHz")]),
                    ),
                    curve(
                        "GammaL=1kHz gammac=300kHz",
                        G,
                        range,
                        &with(&[("GammaL", "1kHz"), ("gammac", "300kHz")]),
                    ),
                ],
            )
        }
        "fig7a" => (
            "microwave preset, squeezed input, F versus Qm",
            ["0", "0.2", "0.5", "0.8"]
                .iter()
                .map(|r| {
                    let mut s = curve(
                        &format!("r={r}"),
                        Qm,
                        qm,
                        &with(&[("GammaL", "1kHz"), ("gammac", "10kHz"), ("tau", "0.95us")]),
                    );
                    s.overrides.push(("r".into(), r.to_string()));
                    s
                })
                .collect(),
        ),
        "fig7b" => (
            "microwave preset, F versus squeezing r at Qm = 360000",
            vec![curve(
                "GammaL=1kHz gammac=10kHz",
                R,
                SweepRange::linear(0.0, 1.0, 41),
                &with(&[
                    ("GammaL", "1kHz"),
                    ("gammac", "10kHz"),
                    ("tau", "0.95us"),
                    ("Qm", "360000"),
                ]),
            )],
        ),
        "fig8" => {
            let opt = [("preset", "groblacher")];
            let w = |extra: &[(&'static str, &'static str)]| -> Vec<(&'static str, &'static str)> {
                opt.iter().chain(extra.iter()).copied().collect()
            };
            (
                "optomechanical preset, F versus Qm",
                vec![
                    curve("GammaL=0", Qm, qm, &w(&[("GammaL", "0")])),
                    curve(
                        "GammaL=1kHz gammac=0.5kHz",
                        Qm,
                        qm,
                        &w(&[("GammaL", "1kHz"), ("gammac", "0.5kHz")]),
                    ),
                    curve(
                        "GammaL=1kHz gammac=1kHz",
                        Qm,
                        qm,
                        &w(&[("GammaL", "1kHz"), ("gammac", "1kHz")]),
                    ),
                ],
            )
        }
        _ => return None,
    };
    Some(Figure {
        name: FIGURE_NAMES.iter().copied().find(|&n| n == name)?,
        description,
        convention,
        sweeps,
    })
}

/// One evaluated sweep point with every effective parameter echoed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub series: String,
    pub axis: String,
    pub value: f64,
    pub fidelity: f64,
    pub n_h: f64,
    pub lambda: f64,
    pub theta: f64,
    pub t_s: f64,
    pub scenario: Scenario,
    pub error: Option<String>,
}

pub const CSV_HEADER: &[&str] = &[
    "series",
    "axis",
    "value",
    "F",
    "n_h",
    "lambda",
    "theta",
    "t_s",
    "tau",
    "omega_m",
    "kappa",
    "gamma",
    "Qm",
    "g0",
    "alpha_s",
    "G",
    "N_m",
    "N_C",
    "noise",
    "GammaL",
    "gammac",
    "alpha_re",
    "alpha_im",
    "r",
    "cooled",
    "psi0",
    "rotation",
    "store_noise",
    "error",
];

impl ResultRow {
    /// Evaluates the scenario; failures become a row with an error message.
    pub fn evaluate(series: &str, axis: &str, value: f64, scenario: Scenario) -> Self {
        let result = evaluate(&scenario.params, &scenario.input, &scenario.protocol);
        Self::from_result(series, axis, value, scenario, result)
    }

    pub fn from_result(
        series: &str,
        axis: &str,
        value: f64,
        scenario: Scenario,
        result: Result<ProtocolOutcome>,
    ) -> Self {
        let nan = f64::NAN;
        let mut row = ResultRow {
            series: series.into(),
            axis: axis.into(),
            value,
            fidelity: nan,
            n_h: nan,
            lambda: nan,
            theta: nan,
            t_s: nan,
            scenario,
            error: None,
        };
        match result {
            Ok(out) => {
                row.fidelity = out.fidelity.fidelity;
                row.n_h = out.fidelity.n_h;
                row.lambda = out.fidelity.lambda;
                row.theta = out.fidelity.theta;
                row.t_s = out.t_s;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }

    pub fn record(&self) -> Vec<String> {
        let f = |x: f64| format!("{x}");
        let sc = &self.scenario;
        let p = &sc.params;
        vec![
            self.series.clone(),
            self.axis.clone(),
            f(self.value),
            f(self.fidelity),
            f(self.n_h),
            f(self.lambda),
            f(self.theta),
            f(self.t_s),
            f(sc.protocol.tau),
            f(p.omega_m),
            f(p.kappa),
            f(p.gamma),
            f(p.quality_factor()),
            f(p.g0),
            f(p.alpha_s),
            f(p.coupling()),
            f(p.n_m),
            f(p.n_c),
            match p.noise.mode {
                NoiseMode::Colored => "colored",
                NoiseMode::WhiteExact => "white-exact",
                NoiseMode::NoNoise => "none",
            }
            .into(),
            f(p.noise.gamma_l),
            f(p.noise.gamma_c),
            f(sc.input.alpha.re),
            f(sc.input.alpha.im),
            f(sc.input.r),
            sc.input.mechanical_cooled.to_string(),
            match sc.input.psi0 {
                Psi0Mode::PaperQuarter => "paper",
                Psi0Mode::Stationary => "stationary",
            }
            .into(),
            match sc.protocol.rotation {
                RotationMode::FixedTotalTime => "fixed",
                RotationMode::NumericOptimize => "optimize",
            }
            .into(),
            match sc.protocol.store_coupling {
                StoreCoupling::Retained => "retained",
                StoreCoupling::Decoupled => "decoupled",
            }
            .into(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Evaluates every point of every curve in parallel. Rows come back grouped
/// by curve and ascending along the axis.
pub fn run_sweep(
    sweeps: &[SweepSpec],
    base: &Config,
    forced: Option<FrequencyConvention>,
) -> std::result::Result<Vec<ResultRow>, ConfigError> {
    let mut jobs = Vec::new();
    for spec in sweeps {
        spec.range.validate().map_err(|m| ConfigError {
            unstable: false,
            origin: "sweep".into(),
            line: None,
            key: Some(spec.axis.name().into()),
            message: m,
        })?;
        let scenario = spec.config(base)?.resolve(forced)?;
        for v in spec.range.values() {
            jobs.push((spec, scenario.clone(), v));
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(spec, mut sc, v)| match spec.axis.apply(v, &mut sc) {
            Ok(()) => ResultRow::evaluate(&spec.label, spec.axis.name(), v, sc),
            Err(e) => {
                let mut row = ResultRow::evaluate(&spec.label, spec.axis.name(), v, sc);
                row.error = Some(e.to_string());
                row
            }
        })
        .collect())
}

/// `#` metadata lines, then a header row, then one row per point.
pub fn write_csv<W: Write>(
    mut out: W,
    metadata: &[String],
    rows: &[ResultRow],
) -> std::io::Result<()> {
    for line in metadata {
        for l in line.lines() {
            writeln!(out, "# {l}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()
}

/// Metadata echoing every curve's resolved base scenario.
pub fn metadata(
    title: &str,
    sweeps: &[SweepSpec],
    base: &Config,
    forced: Option<FrequencyConvention>,
) -> std::result::Result<Vec<String>, ConfigError> {
    let mut meta = vec![format!("omem {} {title}", env!("CARGO_PKG_VERSION"))];
    for s in sweeps {
        let sc = s.config(base)?.resolve(forced)?;
        meta.push(format!(
            "series '{}': axis = {}, {} points {:?} from {} to {}",
            s.label, s.axis, s.range.points, s.range.spacing, s.range.start, s.range.stop
        ));
        for l in sc.dump().lines() {
            meta.push(format!("  [{}] {l}", s.label));
        }
    }
    Ok(meta)
}
