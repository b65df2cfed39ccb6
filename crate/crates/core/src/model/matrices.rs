use nalgebra::{Matrix4, Matrix5};

use super::params::{CouplingPhase, NoiseMode, PhysicalParams};
use crate::error::{Error, Result};

/// Row/column of `p₂`, the optical quadrature the frequency noise drives.
pub const OPTICAL_P: usize = 3;
/// Row/column of the auxiliary frequency-noise variable `ψ`.
pub const PSI: usize = 4;

/// Extended 5×5 drift `Q_E` for one protocol segment.
///
/// ```text
/// ⎡ −γ/2    ω_m    0     −sG    0   ⎤
/// ⎢ −ω_m   −γ/2    sG     0     0   ⎥
/// ⎢  0     −sG    −κ/2   ω_m    0   ⎥
/// ⎢  sG     0     −ω_m  −κ/2  −α_s  ⎥
/// ⎣  0      0      0      0    −γ_c ⎦
/// ```
///
/// with `s = +1, 0, −1` for write, store and read. Only the `G` entries depend
/// on the segment; the `−α_s` noise injection is kept in every segment.
pub fn drift_matrix(params: &PhysicalParams, phase: CouplingPhase) -> Matrix5<f64> {
    let g = phase.sign() * params.coupling();
    let w = params.omega_m;
    let hg = 0.5 * params.gamma;
    let hk = 0.5 * params.kappa;
    #[rustfmt::skip]
    let q = Matrix5::new(
        -hg,  w,   0.0, -g,   0.0,
        -w,  -hg,  g,    0.0, 0.0,
        0.0, -g,  -hk,   w,   0.0,
        g,    0.0, -w,  -hk,  -params.alpha_s,
        0.0,  0.0, 0.0,  0.0, -params.noise.gamma_c,
    );
    q
}

/// Upper-left 4×4 block of [`drift_matrix`], used for the noise-free means.
pub fn drift_matrix_mean(params: &PhysicalParams, phase: CouplingPhase) -> Matrix4<f64> {
    drift_matrix(params, phase)
        .fixed_view::<4, 4>(0, 0)
        .into_owned()
}

/// Diagonal diffusion matrix `N`.
///
/// Colored noise: `diag(γ̄/4, γ̄/4, κ̄/4, κ̄/4, 2γ_c²Γ_L)` with
/// `γ̄ = γ(1+2N_m)` and `κ̄ = κ(1+2N_C)`. White-exact noise: the `ψ` entry is
/// zero and `p₂` picks up `2Γ_L α_s²` instead.
pub fn diffusion_matrix(params: &PhysicalParams) -> Result<Matrix5<f64>> {
    let noise = &params.noise;
    if noise.mode == NoiseMode::WhiteExact && noise.gamma_c != 0.0 {
        return Err(Error::Config(
            "white-exact noise and a finite cutoff gammac are mutually exclusive".into(),
        ));
    }
    let gamma_bar = params.gamma * (1.0 + 2.0 * params.n_m);
    let kappa_bar = params.kappa * (1.0 + 2.0 * params.n_c);
    let linewidth = noise.effective_linewidth();
    let mut n = Matrix5::zeros();
    n[(0, 0)] = gamma_bar / 4.0;
    n[(1, 1)] = gamma_bar / 4.0;
    n[(2, 2)] = kappa_bar / 4.0;
    n[(3, 3)] = kappa_bar / 4.0;
    match noise.mode {
        NoiseMode::Colored | NoiseMode::NoNoise => {
            n[(PSI, PSI)] = 2.0 * noise.gamma_c * noise.gamma_c * linewidth;
        }
        NoiseMode::WhiteExact => {
            n[(OPTICAL_P, OPTICAL_P)] += 2.0 * linewidth * params.alpha_s * params.alpha_s;
        }
    }
    Ok(n)
}

/// Free-rotation generator `Q_r`: both modes rotate at `ω_m`, `ψ` untouched.
/// `exp(−Q_r t)` undoes the free evolution over a time `t`.
pub fn rotation_generator(omega_m: f64) -> Matrix5<f64> {
    let mut q = Matrix5::zeros();
    q[(0, 1)] = omega_m;
    q[(1, 0)] = -omega_m;
    q[(2, 3)] = omega_m;
    q[(3, 2)] = -omega_m;
    q
}

/// Linearized quadrature drift before the rotating-wave approximation, with
/// effective detuning `delta`. Only used to classify fixed-point stability:
/// the RWA drift is Hurwitz for any positive damping and cannot see
/// bistability.
pub fn drift_matrix_full(params: &PhysicalParams, delta: f64) -> Matrix4<f64> {
    let w = params.omega_m;
    let hg = 0.5 * params.gamma;
    let hk = 0.5 * params.kappa;
    let g2 = 2.0 * params.coupling();
    #[rustfmt::skip]
    let q = Matrix4::new(
        -hg,  w,    0.0,    0.0,
        -w,  -hg,   g2,     0.0,
        0.0,  0.0, -hk,     delta,
        g2,   0.0, -delta, -hk,
    );
    q
}

/// Every drift the protocol and the stability check use, for one parameter
/// set.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSet {
    pub write: Matrix5<f64>,
    pub store: Matrix5<f64>,
    pub read: Matrix5<f64>,
    pub rotation: Matrix5<f64>,
    /// Non-RWA drift at the effective detuning.
    pub full: Matrix4<f64>,
}

impl DriftSet {
    /// `delta` defaults to the red-sideband choice `Δ = ω_m`.
    pub fn new(params: &PhysicalParams, delta: Option<f64>) -> Self {
        Self {
            write: drift_matrix(params, CouplingPhase::Write),
            store: drift_matrix(params, CouplingPhase::Store),
            read: drift_matrix(params, CouplingPhase::Read),
            rotation: rotation_generator(params.omega_m),
            full: drift_matrix_full(params, delta.unwrap_or(params.omega_m)),
        }
    }

    pub fn extended(&self, phase: CouplingPhase) -> &Matrix5<f64> {
        match phase {
            CouplingPhase::Write => &self.write,
            CouplingPhase::Store => &self.store,
            CouplingPhase::Read => &self.read,
        }
    }

    pub fn mean(&self, phase: CouplingPhase) -> Matrix4<f64> {
        self.extended(phase).fixed_view::<4, 4>(0, 0).into_owned()
    }
}
