//! Built-in parameter sets for two published devices.

use std::f64::consts::TAU;

use super::config::Scenario;
use super::units::FrequencyConvention;
use crate::model::{NoiseSpec, PhysicalParams};
use crate::protocol::{InputState, ProtocolSpec};

pub const PRESET_NAMES: &[&str] = &["teufel", "groblacher"];

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub scenario: Scenario,
}

/// Looks a preset up by name. `microwave` and `optomechanical` are aliases.
pub fn preset(name: &str) -> Option<Preset> {
    match name.trim().to_ascii_lowercase().as_str() {
        "teufel" | "microwave" => Some(teufel()),
        "groblacher" | "gröblacher" | "optomechanical" => Some(groblacher()),
        _ => None,
    }
}

pub fn all() -> Vec<Preset> {
    PRESET_NAMES.iter().filter_map(|n| preset(n)).collect()
}

/// Superconducting LC circuit coupled to a drum: 10.69 MHz mechanics,
/// 170 kHz cavity linewidth, G = 0.05 ω_m, Q_m = 3.6e5, τ = 64/ω_m.
fn teufel() -> Preset {
    let omega_m = TAU * 10.69e6;
    let g0 = TAU * 230.0;
    let params = PhysicalParams {
        omega_m,
        kappa: TAU * 170e3,
        gamma: omega_m / 3.6e5,
        g0,
        alpha_s: 0.05 * omega_m / g0,
        n_m: 3.0,
        n_c: 0.0,
        noise: NoiseSpec::none(),
    };
    Preset {
        name: "teufel",
        description: "microwave electromechanical circuit, omega_m = 2pi x 10.69 MHz",
        scenario: Scenario {
            name: "teufel".into(),
            params,
            input: InputState::coherent(1.0),
            protocol: ProtocolSpec::with_storage(64.0 / omega_m),
            convention: FrequencyConvention::default(),
        },
    }
}

/// Optical cavity with a micromechanical resonator: 947 kHz mechanics,
/// 215 kHz cavity linewidth, γ = 2π·140 Hz, G = 2π·229.81 kHz, τ = 0.95 μs.
fn groblacher() -> Preset {
    let g0 = TAU * 1.91;
    let params = PhysicalParams {
        omega_m: TAU * 947e3,
        kappa: TAU * 215e3,
        gamma: TAU * 140.0,
        g0,
        alpha_s: TAU * 229.81e3 / g0,
        n_m: 3.0,
        n_c: 0.0,
        noise: NoiseSpec::none(),
    };
    Preset {
        name: "groblacher",
        description: "optomechanical cavity, omega_m = 2pi x 947 kHz",
        scenario: Scenario {
            name: "groblacher".into(),
            params,
            input: InputState::coherent(1.0),
            protocol: ProtocolSpec::with_storage(0.95e-6),
            convention: FrequencyConvention::default(),
        },
    }
}
