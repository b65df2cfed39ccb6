//! Which reading of "kHz" reproduces the reference fidelities.
//!
//! A linewidth quoted as `1 kHz` is either `2π·1000 rad/s` (ordinary) or
//! `1000 rad/s` (angular). The report evaluates the four reference points
//! under both readings and tabulates them against their targets.

use std::fmt::Write as _;

use super::config::Config;
use super::units::FrequencyConvention;
use crate::error::Result;
use crate::protocol::{evaluate, StoreCoupling};

/// One reference point: a config, a target and an allowed band.
#[derive(Debug, Clone, Copy)]
pub struct Reference {
    pub label: &'static str,
    pub config: &'static str,
    pub lo: f64,
    pub hi: f64,
}

pub const REFERENCES: &[Reference] = &[
    Reference {
        label: "optomechanical, GammaL = 0",
        config: "preset = groblacher\nGammaL = 0\nalpha = 1\nr = 0",
        lo: 0.779,
        hi: 0.799,
    },
    Reference {
        label: "optomechanical, GammaL = 1 kHz, gammac = 1 kHz",
        config: "preset = groblacher\nGammaL = 1 kHz\ngammac = 1 kHz",
        lo: 0.25,
        hi: 0.31,
    },
    Reference {
        label: "microwave, GammaL = 0",
        config: "preset = teufel\nGammaL = 0",
        lo: 0.93,
        hi: 0.97,
    },
    Reference {
        label: "microwave, GammaL = 1 kHz, gammac = 0.5 MHz",
        config: "preset = teufel\nGammaL = 1 kHz\ngammac = 0.5 MHz",
        lo: 0.63,
        hi: 0.69,
    },
];

/// Fidelity of a reference point under a convention and store coupling.
pub fn reference_fidelity(
    r: &Reference,
    convention: FrequencyConvention,
    store: StoreCoupling,
) -> Result<f64> {
    let mut sc = Config::parse(r.config, r.label)?.resolve(Some(convention))?;
    sc.protocol.store_coupling = store;
    Ok(evaluate(&sc.params, &sc.input, &sc.protocol)?
        .fidelity
        .fidelity)
}

/// Markdown report with both conventions tabulated.
pub fn convention_report() -> Result<String> {
    let conventions = [FrequencyConvention::Ordinary, FrequencyConvention::Angular];
    let mut out = String::new();
    let mut hits = [0usize; 2];
    writeln!(out, "# Frequency convention calibration\n").unwrap();
    writeln!(
        out,
        "Generated by `omem calibrate`. Each row is one reference scenario evaluated with \
         `1 kHz` read as `2π·1000 rad/s` (ordinary) and as `1000 rad/s` (angular). \
         The store-phase noise coupling is the default (`retained`); the `decoupled` \
         column shows the angular result with the noise drive off during storage.\n"
    )
    .unwrap();
    writeln!(
        out,
        "| scenario | target band | ordinary | angular | angular, decoupled store |"
    )
    .unwrap();
    writeln!(out, "|---|---|---|---|---|").unwrap();
    for r in REFERENCES {
        let mut cells = Vec::new();
        for (k, c) in conventions.iter().enumerate() {
            let f = reference_fidelity(r, *c, StoreCoupling::Retained)?;
            let ok = (r.lo..=r.hi).contains(&f);
            hits[k] += ok as usize;
            cells.push(format!("{f:.4} {}", if ok { "(in band)" } else { "(out)" }));
        }
        let dec = reference_fidelity(r, FrequencyConvention::Angular, StoreCoupling::Decoupled)?;
        writeln!(
            out,
            "| {} | [{}, {}] | {} | {} | {:.4} |",
            r.label, r.lo, r.hi, cells[0], cells[1], dec
        )
        .unwrap();
    }
    let (best, n) = if hits[1] >= hits[0] {
        ("angular", hits[1])
    } else {
        ("ordinary", hits[0])
    };
    writeln!(
        out,
        "\nIn band: ordinary {}/{}, angular {}/{}.\n",
        hits[0],
        REFERENCES.len(),
        hits[1],
        REFERENCES.len()
    )
    .unwrap();
    writeln!(
        out,
        "**The {best} convention reproduces the reference values ({n} of {} in band).** \
         Noiseless rows do not depend on the convention because every noiseless rate in \
         the presets is already stored in rad/s. Under the ordinary reading a 1 kHz \
         linewidth is 2π times stronger and both noisy fidelities collapse below 0.02.\n",
        REFERENCES.len()
    )
    .unwrap();
    writeln!(
        out,
        "Use `--frequency-convention angular` to reproduce the reference values. The \
         default stays `ordinary` so that `1kHz` on the command line means what it says \
         in SI. Figure bundles (`--figure`) default to angular."
    )
    .unwrap();
    Ok(out)
}
