//! Monte Carlo cross-check of the covariance engine: Ornstein–Uhlenbeck
//! frequency-noise paths driving Euler–Maruyama integration of the linear
//! quadrature equations.
//!
//! Randomness comes from ChaCha8 with one stream per trajectory
//! (`seed_from_u64(seed)` then `set_stream(index)`), so serial and parallel
//! runs draw identical numbers.

use nalgebra::{Matrix5, SMatrix, Vector5};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::model::{drift_matrix, CouplingPhase, NoiseMode, NoiseSpec, PhysicalParams, PSI};
use crate::propagate::GaussianState;
use crate::protocol::Psi0Mode;

/// Blow-up threshold on any quadrature.
const BLOW_UP: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    /// Step in seconds.
    pub dt: f64,
    pub n_steps: usize,
    pub n_traj: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMoments {
    pub mean: nalgebra::Vector4<f64>,
    pub cov: Matrix5<f64>,
    pub stderr_mean: nalgebra::Vector4<f64>,
    pub stderr_cov: Matrix5<f64>,
    pub n_traj: usize,
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(domain(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_traj < 2 {
            return Err(domain("n_traj must be >= 2"));
        }
        Ok(())
    }

    /// Warns when `dt` exceeds `0.05` of the fastest scaled rate.
    pub fn step_warning(&self, params: &PhysicalParams) -> Option<String> {
        let s = params.scaled();
        let fastest = [1.0, s.kappa, s.gamma, s.coupling(), s.noise.gamma_c]
            .into_iter()
            .fold(0.0, f64::max);
        let dt = self.dt * params.omega_m;
        (dt > 0.05 / fastest).then(|| {
            format!("dt = {dt:.3e}/omega_m exceeds 0.05/{fastest:.3e}; Euler-Maruyama bias may dominate")
        })
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(rng: &mut impl RngCore) -> f64 {
    StandardNormal.sample(rng)
}

/// Exact OU recursion `ψ ← ψ e^{−γ_c dt} + √(Γ_Lγ_c(1 − e^{−2γ_c dt}))·ξ`.
#[derive(Debug, Clone, Copy)]
struct OuStep {
    decay: f64,
    kick: f64,
}

impl OuStep {
    fn new(noise: &NoiseSpec, dt: f64) -> Self {
        let gl = noise.effective_linewidth();
        let decay = (-noise.gamma_c * dt).exp();
        // 1 − e^{−2γ_c dt} without cancellation for small γ_c dt.
        let kick = (gl * noise.gamma_c * -(-2.0 * noise.gamma_c * dt).exp_m1()).sqrt();
        Self { decay, kick }
    }

    fn advance(&self, psi: f64, rng: &mut impl RngCore) -> f64 {
        psi * self.decay + self.kick * normal(rng)
    }
}

/// One sampled frequency-noise path `ψ₀, ψ₁, …, ψ_{n_steps}` in rad/s.
/// `ψ₀` has standard deviation ½ rad/s for [`Psi0Mode::PaperQuarter`] and
/// `√(Γ_Lγ_c)` for [`Psi0Mode::Stationary`]; it is zero when the noise is off.
pub fn ou_path(
    noise: &NoiseSpec,
    dt: f64,
    n_steps: usize,
    seed: u64,
    psi0: Psi0Mode,
) -> Result<Vec<f64>> {
    match noise.mode {
        NoiseMode::WhiteExact => {
            return Err(Error::Config(
                "white-exact noise has no OU path; use a large gammac instead".into(),
            ))
        }
        NoiseMode::Colored | NoiseMode::NoNoise => {}
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(domain(format!("dt must be > 0, got {dt}")));
    }
    let mut rng = rng_for(seed, 0);
    let step = OuStep::new(noise, dt);
    let sd0 = if noise.is_active() {
        match psi0 {
            Psi0Mode::PaperQuarter => 0.5,
            Psi0Mode::Stationary => (noise.gamma_l * noise.gamma_c).sqrt(),
        }
    } else {
        0.0
    };
    let mut psi = sd0 * normal(&mut rng);
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(psi);
    for _ in 0..n_steps {
        psi = step.advance(psi, &mut rng);
        out.push(psi);
    }
    Ok(out)
}

/// Integrates `n_traj` independent trajectories through `phases` (coupling
/// phase and duration in seconds) and returns the across-trajectory moments
/// of `(x₁, p₁, x₂, p₂, ψ)` in scaled units, with jackknife standard errors.
///
/// The drift is the deterministic engine's `Q_E` with the `ψ` row removed;
/// `ψ` itself follows the exact OU recursion and enters `p₂` through
/// `−α_s ψ`. Thermal and vacuum inputs are white increments with variance
/// `γ̄/4·dt` and `κ̄/4·dt` per quadrature.
pub fn simulate_trajectories(
    params: &PhysicalParams,
    state0: &GaussianState,
    phases: &[(CouplingPhase, f64)],
    cfg: &TrajectoryConfig,
) -> Result<EmpiricalMoments> {
    params.validate()?;
    cfg.validate()?;
    if params.noise.mode == NoiseMode::WhiteExact {
        return Err(Error::Config(
            "the trajectory oracle needs colored noise; use a large gammac instead".into(),
        ));
    }
    if let Some(w) = cfg.step_warning(params) {
        log::warn!("{w}");
    }
    let scaled = params.scaled();
    let dt = cfg.dt * params.omega_m;

    // Segment schedule in whole steps; the drift for each.
    let mut schedule = Vec::new();
    for &(phase, duration) in phases {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(domain("segment durations must be >= 0"));
        }
        let steps = (duration * params.omega_m / dt).round() as usize;
        schedule.push((drift_matrix(&scaled, phase), steps));
    }
    if cfg.n_steps > 0 {
        let total: usize = schedule.iter().map(|s| s.1).sum();
        if total != cfg.n_steps {
            log::debug!("segment steps ({total}) override n_steps ({})", cfg.n_steps);
        }
    }

    let gamma_bar = scaled.gamma * (1.0 + 2.0 * scaled.n_m);
    let kappa_bar = scaled.kappa * (1.0 + 2.0 * scaled.n_c);
    let input_sd = [
        (gamma_bar / 4.0 * dt).sqrt(),
        (gamma_bar / 4.0 * dt).sqrt(),
        (kappa_bar / 4.0 * dt).sqrt(),
        (kappa_bar / 4.0 * dt).sqrt(),
    ];
    let ou = OuStep::new(&scaled.noise, dt);
    let chol = sampling_factor(&state0.cov);
    let mean0 = Vector5::new(
        state0.mean[0],
        state0.mean[1],
        state0.mean[2],
        state0.mean[3],
        0.0,
    );

    let finals: Vec<Result<Vector5<f64>>> = (0..cfg.n_traj)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(cfg.seed, k as u64);
            let z = Vector5::from_fn(|_, _| normal(&mut rng));
            let mut x = mean0 + chol * z;
            for (q, steps) in &schedule {
                for _ in 0..*steps {
                    let psi = x[PSI];
                    let mut next = x;
                    for i in 0..4 {
                        let mut drift = 0.0;
                        for j in 0..5 {
                            drift += q[(i, j)] * x[j];
                        }
                        next[i] = x[i] + drift * dt + input_sd[i] * normal(&mut rng);
                    }
                    next[PSI] = ou.advance(psi, &mut rng);
                    x = next;
                }
                if x.iter()
                    .take(4)
                    .any(|v| !v.is_finite() || v.abs() > BLOW_UP)
                {
                    return Err(Error::Numerical(format!(
                        "trajectory {k} blew up; reduce dt"
                    )));
                }
            }
            Ok(x)
        })
        .collect();
    let samples = finals.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(moments(&samples))
}

/// Lower-triangular `L` with `L Lᵀ = V`, tolerating zero-variance rows.
fn sampling_factor(cov: &Matrix5<f64>) -> Matrix5<f64> {
    let eig = cov.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    eig.eigenvectors * Matrix5::from_diagonal(&sqrt_vals)
}

/// Sample means and covariances with leave-one-out jackknife errors.
fn moments(samples: &[Vector5<f64>]) -> EmpiricalMoments {
    let n = samples.len();
    let nf = n as f64;
    let sum: Vector5<f64> = samples.iter().sum();
    let mean = sum / nf;
    let mut sum_outer = Matrix5::zeros();
    for x in samples {
        let d = x - mean;
        sum_outer += d * d.transpose();
    }
    let cov = sum_outer / (nf - 1.0);

    // Jackknife: leave out sample i, recompute the unbiased covariance from
    // running sums; then var_jk = (n−1)/n Σ (θ_i − θ̄)².
    let mut raw_sum = SMatrix::<f64, 5, 5>::zeros();
    for x in samples {
        raw_sum += x * x.transpose();
    }
    let m = nf - 1.0;
    let mut acc = Matrix5::zeros();
    let mut acc_sq = Matrix5::zeros();
    let mut loo_values = Vec::with_capacity(n);
    for x in samples {
        let s1 = sum - x;
        let s2 = raw_sum - x * x.transpose();
        let mu = s1 / m;
        let c = if m > 1.0 {
            (s2 - mu * s1.transpose()) / (m - 1.0)
        } else {
            Matrix5::zeros()
        };
        acc += c;
        loo_values.push(c);
    }
    let loo_mean = acc / nf;
    for c in &loo_values {
        let d = c - loo_mean;
        acc_sq += d.component_mul(&d);
    }
    let stderr_cov = if n >= 3 {
        (acc_sq * ((nf - 1.0) / nf)).map(f64::sqrt)
    } else {
        // Two samples leave nothing to jackknife; Gaussian-theory errors.
        Matrix5::from_fn(|i, j| {
            ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / (nf - 1.0)).sqrt()
        })
    };

    let var_mean = cov.diagonal() / nf;
    EmpiricalMoments {
        mean: mean.fixed_rows::<4>(0).into_owned(),
        cov: (cov + cov.transpose()) * 0.5,
        stderr_mean: var_mean.fixed_rows::<4>(0).map(f64::sqrt),
        stderr_cov,
        n_traj: n,
    }
}
