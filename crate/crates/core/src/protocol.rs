//! The write / store / read storage protocol, phase-space rotation
//! compensation and the Gaussian fidelity of the retrieved optical state.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix5, Vector4};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::model::{
    diffusion_matrix, drift_matrix, CouplingPhase, NoiseMode, PhysicalParams, OPTICAL_P, PSI,
};
use crate::propagate::{propagate, GaussianState};

/// Initial variance of `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Psi0Mode {
    /// `¼ (rad/s)²`, the literal fifth diagonal entry of the initial
    /// covariance read in SI units.
    PaperQuarter,
    /// `Γ_L γ_c`, the equilibrium variance of the frequency noise.
    Stationary,
}

/// Squeezed coherent input `D(α) S(r)|0⟩` of the optical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    pub alpha: Complex64,
    pub r: f64,
    /// Mechanical mode starts in its ground state; otherwise thermal with
    /// occupancy `N_m`.
    pub mechanical_cooled: bool,
    pub psi0: Psi0Mode,
}

impl InputState {
    pub fn coherent(alpha: f64) -> Self {
        Self {
            alpha: Complex64::new(alpha, 0.0),
            r: 0.0,
            mechanical_cooled: true,
            psi0: Psi0Mode::PaperQuarter,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(domain("input displacement and squeezing must be finite"));
        }
        Ok(())
    }
}

/// How the free rotation at `ω_m` is removed before comparing states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotationMode {
    /// Undo exactly `ω_m (2 t_s + τ)`.
    FixedTotalTime,
    /// Search the rotation angle that maximizes the fidelity.
    NumericOptimize,
}

/// Whether the `−α_s ψ` drive stays on while the state is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StoreCoupling {
    /// Store drift is the write drift with the `G` entries zeroed only.
    Retained,
    /// The frequency noise is disconnected from the cavity during storage.
    Decoupled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    /// Write/read pulse length in seconds; `None` means `π/(2G)`.
    pub t_s: Option<f64>,
    /// Storage time in seconds.
    pub tau: f64,
    pub rotation: RotationMode,
    pub store_coupling: StoreCoupling,
    /// Simulate the cooling π/2 pulse instead of assuming a cooled
    /// oscillator.
    pub cooling_pre_pulse: bool,
}

impl ProtocolSpec {
    pub fn with_storage(tau: f64) -> Self {
        Self {
            t_s: None,
            tau,
            rotation: RotationMode::FixedTotalTime,
            store_coupling: StoreCoupling::Retained,
            cooling_pre_pulse: false,
        }
    }

    /// Pulse length in seconds.
    pub fn pulse_time(&self, params: &PhysicalParams) -> Result<f64> {
        match self.t_s {
            Some(t) => Ok(t),
            None => {
                let g = params.coupling();
                if g > 0.0 {
                    Ok(PI / (2.0 * g))
                } else {
                    Err(Error::Config("pulse length pi/(2G) needs G > 0".into()))
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.t_s {
            if !(t.is_finite() && t >= 0.0) {
                return Err(domain(format!("t_s must be >= 0, got {t}")));
            }
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(domain(format!("tau must be >= 0, got {}", self.tau)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityResult {
    pub fidelity: f64,
    /// Effective number of heating quanta `n̄_h`.
    pub n_h: f64,
    /// Damping parameter `λ ≥ 0`.
    pub lambda: f64,
    /// Rotation angle applied before comparing (radians, in `[0, 2π)`).
    pub theta: f64,
}

/// Initial covariance and means.
pub fn initial_state(input: &InputState, params: &PhysicalParams) -> GaussianState {
    let mech = if input.mechanical_cooled {
        0.25
    } else {
        0.25 * (1.0 + 2.0 * params.n_m)
    };
    let e2r = (2.0 * input.r).exp();
    let mut cov = Matrix5::zeros();
    cov[(0, 0)] = mech;
    cov[(1, 1)] = mech;
    cov[(2, 2)] = 0.25 / e2r;
    cov[(3, 3)] = 0.25 * e2r;
    cov[(PSI, PSI)] = psi_variance(input.psi0, params);
    let mean = Vector4::new(0.0, 0.0, input.alpha.re, input.alpha.im);
    GaussianState::new(mean, cov, 1.0 / params.omega_m)
}

/// `ψ` variance in units of `ω_m²`. Zero whenever the frequency noise is off
/// or carried entirely by the white-exact diffusion.
fn psi_variance(mode: Psi0Mode, params: &PhysicalParams) -> f64 {
    let noise = &params.noise;
    if !noise.is_active() || noise.mode == NoiseMode::WhiteExact {
        return 0.0;
    }
    let w2 = params.omega_m * params.omega_m;
    match mode {
        Psi0Mode::PaperQuarter => 0.25 / w2,
        Psi0Mode::Stationary => noise.gamma_l * noise.gamma_c / w2,
    }
}

/// Drift and diffusion of one segment, in scaled units.
fn segment_matrices(
    scaled: &PhysicalParams,
    phase: CouplingPhase,
    store: StoreCoupling,
) -> Result<(Matrix5<f64>, Matrix5<f64>)> {
    let mut q = drift_matrix(scaled, phase);
    let mut n = diffusion_matrix(scaled)?;
    if phase == CouplingPhase::Store && store == StoreCoupling::Decoupled {
        q[(OPTICAL_P, PSI)] = 0.0;
        if scaled.noise.mode == NoiseMode::WhiteExact {
            let mut quiet = *scaled;
            quiet.noise.gamma_l = 0.0;
            n = diffusion_matrix(&quiet)?;
        }
    }
    Ok((q, n))
}

/// Write (`+G`, `t_s`) → store (`G = 0`, `τ`) → read (`−G`, `t_s`) applied to
/// means and covariance, with diffusion in every segment. `params` are in
/// SI units; `state` is in scaled units as produced by [`initial_state`].
/// The result still carries the free rotation; see [`rotate_compensate`].
pub fn run_protocol(
    params: &PhysicalParams,
    state: &GaussianState,
    spec: &ProtocolSpec,
) -> Result<GaussianState> {
    params.validate()?;
    spec.validate()?;
    let scaled = params.scaled();
    let t_s = spec.pulse_time(params)? * params.omega_m;
    let tau = spec.tau * params.omega_m;
    let mut s = state.clone();
    for (phase, t) in [
        (CouplingPhase::Write, t_s),
        (CouplingPhase::Store, tau),
        (CouplingPhase::Read, t_s),
    ] {
        let (q, n) = segment_matrices(&scaled, phase, spec.store_coupling)?;
        s = propagate(&s, &q, &n, t)?;
    }
    Ok(s)
}

/// Cooling π/2 pulse: a write-phase swap from a thermal oscillator and an
/// empty cavity, after which the cavity is reloaded with the input state.
pub fn cooled_start(
    input: &InputState,
    params: &PhysicalParams,
    spec: &ProtocolSpec,
) -> Result<GaussianState> {
    let thermal = InputState {
        alpha: Complex64::new(0.0, 0.0),
        r: 0.0,
        mechanical_cooled: false,
        psi0: input.psi0,
    };
    let scaled = params.scaled();
    let t_s = spec.pulse_time(params)? * params.omega_m;
    let (q, n) = segment_matrices(&scaled, CouplingPhase::Write, spec.store_coupling)?;
    let after = propagate(&initial_state(&thermal, params), &q, &n, t_s)?;

    let fresh = initial_state(input, params);
    let mut cov = after.cov;
    for i in 0..5 {
        for j in 2..4 {
            cov[(i, j)] = 0.0;
            cov[(j, i)] = 0.0;
        }
    }
    cov.fixed_view_mut::<2, 2>(2, 2)
        .copy_from(&fresh.optical_cov());
    let mut mean = after.mean;
    mean[2] = fresh.mean[2];
    mean[3] = fresh.mean[3];
    Ok(GaussianState::new(mean, cov, fresh.time_unit))
}

/// Removes the free rotation from `state`. Returns the rotated state and the
/// angle used. `NumericOptimize` never does worse than the fixed angle.
pub fn rotate_compensate(
    state: &GaussianState,
    reference: &GaussianState,
    spec: &ProtocolSpec,
    params: &PhysicalParams,
) -> Result<(GaussianState, f64)> {
    let t_s = spec.pulse_time(params)?;
    let fixed = (params.omega_m * (2.0 * t_s + spec.tau)).rem_euclid(TAU);
    match spec.rotation {
        RotationMode::FixedTotalTime => Ok((state.rotated(fixed), fixed)),
        RotationMode::NumericOptimize => {
            let score = |theta: f64| {
                fidelity(reference, &state.rotated(theta))
                    .map(|f| f.fidelity)
                    .unwrap_or(f64::NEG_INFINITY)
            };
            let theta = maximize_angle(score, fixed);
            Ok((state.rotated(theta), theta))
        }
    }
}

/// 720-point grid over `[0, 2π)` followed by golden-section refinement
/// around the best grid point; `seed` is always a candidate.
fn maximize_angle(f: impl Fn(f64) -> f64, seed: f64) -> f64 {
    const GRID: usize = 720;
    let step = TAU / GRID as f64;
    let mut best = (seed, f(seed));
    for k in 0..GRID {
        let theta = k as f64 * step;
        let v = f(theta);
        if v > best.1 {
            best = (theta, v);
        }
    }
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    for (theta, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (theta, v);
        }
    }
    best.0.rem_euclid(TAU)
}

/// Overlap `Tr(ρ_i ρ_f)` of the optical modes of two Gaussian states:
/// `F = e^{−λ²/(1+n̄_h)} / (1+n̄_h)` with `n̄_h = 2√det(V_i+V_f) − 1` and
/// `λ² = √det(V_i+V_f)·Δξᵀ(V_i+V_f)⁻¹Δξ`.
pub fn fidelity(initial: &GaussianState, final_state: &GaussianState) -> Result<FidelityResult> {
    let sum = initial.optical_cov() + final_state.optical_cov();
    let det = sum.determinant();
    if !det.is_finite() || det <= 0.0 {
        return Err(Error::Degenerate(format!("det(V_i + V_f) = {det}")));
    }
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("V_i + V_f is not invertible".into()))?;
    let d = initial.optical_mean() - final_state.optical_mean();
    let root = det.sqrt();
    let n_h = 2.0 * root - 1.0;
    let lambda_sq = (root * d.dot(&(inv * d))).max(0.0);
    let fidelity = (-lambda_sq / (1.0 + n_h)).exp() / (1.0 + n_h);
    Ok(FidelityResult {
        fidelity,
        n_h,
        lambda: lambda_sq.sqrt(),
        theta: 0.0,
    })
}

/// The same overlap in its direct Gaussian form
/// `exp(−½ Δξᵀ(V_i+V_f)⁻¹Δξ) / (2√det(V_i+V_f))`.
pub fn fidelity_overlap_form(initial: &GaussianState, final_state: &GaussianState) -> Result<f64> {
    let sum = initial.optical_cov() + final_state.optical_cov();
    let det = sum.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(Error::Degenerate(format!("det(V_i + V_f) = {det}")));
    }
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("V_i + V_f is not invertible".into()))?;
    let d = initial.optical_mean() - final_state.optical_mean();
    Ok((-0.5 * d.dot(&(inv * d))).exp() / (2.0 * det.sqrt()))
}

/// Everything one protocol evaluation produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub initial: GaussianState,
    /// Retrieved state after rotation compensation.
    pub final_state: GaussianState,
    pub fidelity: FidelityResult,
    /// Pulse length in seconds.
    pub t_s: f64,
    pub tau: f64,
}

/// Prepare the input, run the protocol, compensate the rotation and compare.
pub fn evaluate(
    params: &PhysicalParams,
    input: &InputState,
    spec: &ProtocolSpec,
) -> Result<ProtocolOutcome> {
    params.validate()?;
    input.validate()?;
    spec.validate()?;
    if let Some(w) = params.resolved_sideband_warning() {
        log::warn!("{w}");
    }
    let reference = initial_state(input, params);
    let start = if spec.cooling_pre_pulse {
        cooled_start(input, params, spec)?
    } else {
        reference.clone()
    };
    let raw = run_protocol(params, &start, spec)?;
    let (final_state, theta) = rotate_compensate(&raw, &reference, spec, params)?;
    let mut fid = fidelity(&reference, &final_state)?;
    fid.theta = theta;
    Ok(ProtocolOutcome {
        initial: reference,
        final_state,
        fidelity: fid,
        t_s: spec.pulse_time(params)?,
        tau: spec.tau,
    })
}
