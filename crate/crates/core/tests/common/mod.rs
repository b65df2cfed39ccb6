//! Random physical scenarios shared by the randomized suites.
#![allow(dead_code)]

use nalgebra::Matrix5;
use num_complex::Complex64;
use omem::model::{diffusion_matrix, drift_matrix, CouplingPhase, NoiseSpec, PhysicalParams};
use omem::propagate::propagate;
use omem::propagate::propagate_cov_analytic;
use omem::protocol::{initial_state, InputState, Psi0Mode};
use omem::GaussianState;
use rand::Rng;

/// Scaled parameters (`ω_m = 1`) inside the resolved-sideband regime.
pub fn random_params(rng: &mut impl Rng) -> PhysicalParams {
    let coupling = rng.random_range(0.02..0.5);
    let alpha_s = rng.random_range(1.0..100.0);
    PhysicalParams {
        omega_m: 1.0,
        kappa: rng.random_range(0.0..0.5),
        gamma: rng.random_range(0.0..0.05),
        g0: coupling / alpha_s,
        alpha_s,
        n_m: rng.random_range(0.0..10.0),
        n_c: rng.random_range(0.0..2.0),
        noise: NoiseSpec::colored(rng.random_range(0.0..1e-3), rng.random_range(1e-3..1.0)),
    }
}

pub fn random_input(rng: &mut impl Rng) -> InputState {
    InputState {
        alpha: Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
        r: rng.random_range(-1.0..1.0),
        mechanical_cooled: rng.random_bool(0.5),
        psi0: if rng.random_bool(0.5) {
            Psi0Mode::Stationary
        } else {
            Psi0Mode::PaperQuarter
        },
    }
}

pub fn random_phase(rng: &mut impl Rng) -> CouplingPhase {
    [
        CouplingPhase::Write,
        CouplingPhase::Store,
        CouplingPhase::Read,
    ][rng.random_range(0..3)]
}

/// A random input pushed through a random segment, with the raw symmetry
/// defect of the propagation.
pub fn random_evolved_state(rng: &mut impl Rng) -> (GaussianState, GaussianState, f64) {
    let p = random_params(rng);
    let s0 = initial_state(&random_input(rng), &p);
    let q = drift_matrix(&p, random_phase(rng));
    let n = diffusion_matrix(&p).unwrap();
    let t = rng.random_range(0.0..20.0);
    let (_, report) = propagate_cov_analytic(&s0, &q, &n, t).unwrap();
    let s1 = propagate(&s0, &q, &n, t).unwrap();
    let scale = s1.cov.amax().max(1.0);
    (s0, s1, report.raw_symmetry_defect / scale)
}

pub fn max_abs(m: &Matrix5<f64>) -> f64 {
    m.amax()
}
