use crate::error::{domain, Result};

/// Reduced Planck constant (J·s), CODATA 2018 exact.
const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), exact.
const K_B: f64 = 1.380_649e-23;

/// Bose–Einstein occupancy `1 / (exp(ħω / k_B T) − 1)` of a mode at angular
/// frequency `omega` (rad/s) in a bath at temperature `t_kelvin`.
pub fn thermal_occupation(t_kelvin: f64, omega: f64) -> Result<f64> {
    if !(t_kelvin.is_finite() && t_kelvin > 0.0) {
        return Err(domain(format!("temperature must be > 0 K, got {t_kelvin}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(domain(format!(
            "mode frequency must be > 0 rad/s, got {omega}"
        )));
    }
    let x = HBAR * omega / (K_B * t_kelvin);
    // exp_m1 keeps the high-temperature limit k_B T / ħω accurate.
    Ok(1.0 / x.exp_m1())
}
