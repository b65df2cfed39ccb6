//! Deterministic moments next to their Monte Carlo estimates.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use crate::error::Result;
use crate::model::{diffusion_matrix, drift_matrix, CouplingPhase, NoiseSpec, PhysicalParams};
use crate::propagate::{propagate, GaussianState};
use crate::protocol::{initial_state, InputState, Psi0Mode};
use crate::stochastic::{ou_path, simulate_trajectories, TrajectoryConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentComparison {
    pub name: String,
    pub deterministic: f64,
    pub empirical: f64,
    pub stderr: f64,
    /// `(empirical − deterministic)/stderr`; zero when both agree exactly
    /// and the sample has no spread.
    pub z: f64,
}

impl MomentComparison {
    fn new(name: String, deterministic: f64, empirical: f64, stderr: f64) -> Self {
        let diff = empirical - deterministic;
        let z = if stderr > 0.0 {
            diff / stderr
        } else if diff.abs() <= 1e-12 * deterministic.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            name,
            deterministic,
            empirical,
            stderr,
            z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub rows: Vec<MomentComparison>,
    pub cfg: TrajectoryConfig,
}

impl MonteCarloReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for MonteCarloReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n_traj = {}, dt = {:e} s, seed = {}",
            self.cfg.n_traj, self.cfg.dt, self.cfg.seed
        )?;
        writeln!(
            f,
            "{:<14} {:>16} {:>16} {:>12} {:>8}",
            "moment", "deterministic", "empirical", "stderr", "z"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<14} {:>16.8e} {:>16.8e} {:>12.4e} {:>8.3}",
                r.name, r.deterministic, r.empirical, r.stderr, r.z
            )?;
        }
        write!(f, "max |z| = {:.3}", self.max_abs_z())
    }
}

/// A write pulse small enough to integrate by brute force: `G = 0.2 ω_m`,
/// `α_s = 10`, visible damping, thermal occupancy and phase noise, with a
/// thermal oscillator and the stationary `ψ` distribution at the start.
pub fn default_setup() -> (
    PhysicalParams,
    InputState,
    Vec<(CouplingPhase, f64)>,
    TrajectoryConfig,
) {
    let w = TAU * 10.69e6;
    let params = PhysicalParams {
        omega_m: w,
        kappa: 0.05 * w,
        gamma: 0.01 * w,
        g0: 0.02 * w,
        alpha_s: 10.0,
        n_m: 3.0,
        n_c: 0.5,
        noise: NoiseSpec::colored(1e-3 * w, 0.1 * w),
    };
    let input = InputState {
        mechanical_cooled: false,
        psi0: Psi0Mode::Stationary,
        ..InputState::coherent(1.0)
    };
    let t_s = FRAC_PI_2 / params.coupling();
    let dt = 1e-3 / w;
    let cfg = TrajectoryConfig {
        dt,
        n_steps: (t_s / dt).round() as usize,
        n_traj: 5000,
        seed: 2024,
    };
    (params, input, vec![(CouplingPhase::Write, t_s)], cfg)
}

const NAMES: [&str; 5] = ["x1", "p1", "x2", "p2", "psi"];

/// Runs the trajectories and the covariance engine over the same phases
/// (durations rounded to whole steps) and lines the moments up.
pub fn run_montecarlo(
    params: &PhysicalParams,
    input: &InputState,
    phases: &[(CouplingPhase, f64)],
    cfg: &TrajectoryConfig,
) -> Result<MonteCarloReport> {
    let state0 = initial_state(input, params);
    let emp = simulate_trajectories(params, &state0, phases, cfg)?;

    let scaled = params.scaled();
    let dt = cfg.dt * params.omega_m;
    let mut det: GaussianState = state0;
    for &(phase, duration) in phases {
        let steps = (duration * params.omega_m / dt).round();
        let q = drift_matrix(&scaled, phase);
        let n = diffusion_matrix(&scaled)?;
        det = propagate(&det, &q, &n, steps * dt)?;
    }

    let mut rows = Vec::new();
    for (i, name) in NAMES.iter().take(4).enumerate() {
        rows.push(MomentComparison::new(
            format!("<{name}>"),
            det.mean[i],
            emp.mean[i],
            emp.stderr_mean[i],
        ));
    }
    for (i, a) in NAMES.iter().enumerate() {
        for (j, b) in NAMES.iter().enumerate().skip(i) {
            rows.push(MomentComparison::new(
                format!("V[{a},{b}]"),
                det.cov[(i, j)],
                emp.cov[(i, j)],
                emp.stderr_cov[(i, j)],
            ));
        }
    }
    if params.noise.is_active() {
        rows.push(ou_variance_check(&params.noise, cfg.seed)?);
    }
    Ok(MonteCarloReport { rows, cfg: *cfg })
}

/// Sample variance of one long OU path against `Γ_Lγ_c`. Steps of `10/γ_c`
/// make consecutive samples independent to `e^{−10}`.
pub fn ou_variance_check(noise: &NoiseSpec, seed: u64) -> Result<MomentComparison> {
    const N: usize = 100_000;
    let dt = 10.0 / noise.gamma_c;
    let path = ou_path(noise, dt, N, seed, Psi0Mode::Stationary)?;
    let n = path.len() as f64;
    let mean = path.iter().sum::<f64>() / n;
    let var = path.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let fourth = path.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let stderr = ((fourth - var * var) / n).sqrt();
    Ok(MomentComparison::new(
        "ou variance".into(),
        noise.gamma_l * noise.gamma_c,
        var,
        stderr,
    ))
}
