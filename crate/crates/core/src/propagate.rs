//! Propagation of Gaussian first and second moments under a fixed drift and
//! diffusion pair.
//!
//! Times passed to these functions are in propagation units (`1/ω_m` once the
//! parameters are [scaled](crate::PhysicalParams::scaled)); the state converts
//! them to seconds through its `time_unit`.

use nalgebra::{Matrix2, Matrix4, Matrix5, SMatrix, Vector2, Vector4};

use crate::error::{domain, Result};
use crate::linalg::{expm, symmetrize, symmetry_defect, van_loan};

/// Means and symmetrized covariance of `(x₁, p₁, x₂, p₂, ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    /// `(⟨x₁⟩, ⟨p₁⟩, ⟨x₂⟩, ⟨p₂⟩)`; `ψ` has zero mean.
    pub mean: Vector4<f64>,
    pub cov: Matrix5<f64>,
    /// Accumulated physical time in seconds.
    pub elapsed: f64,
    /// Seconds per propagation time unit (`1/ω_m` for scaled parameters).
    pub time_unit: f64,
}

impl GaussianState {
    pub fn new(mean: Vector4<f64>, cov: Matrix5<f64>, time_unit: f64) -> Self {
        Self {
            mean,
            cov: symmetrize(&cov),
            elapsed: 0.0,
            time_unit,
        }
    }

    pub fn optical_mean(&self) -> Vector2<f64> {
        Vector2::new(self.mean[2], self.mean[3])
    }

    pub fn optical_cov(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn mechanical_cov(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Smallest eigenvalue of the Hermitian matrix `V₄ + (i/4)Ω` built from
    /// the physical 4×4 block. Non-negative (up to rounding) for any quantum
    /// state in the vacuum = ¼ convention.
    pub fn uncertainty_floor(&self) -> f64 {
        let v = self.cov.fixed_view::<4, 4>(0, 0);
        let mut omega = Matrix4::zeros();
        omega[(0, 1)] = 0.25;
        omega[(1, 0)] = -0.25;
        omega[(2, 3)] = 0.25;
        omega[(3, 2)] = -0.25;
        // Real 8×8 embedding [[A, −B], [B, A]] of A + iB; same spectrum,
        // every eigenvalue doubled.
        let mut real = SMatrix::<f64, 8, 8>::zeros();
        real.fixed_view_mut::<4, 4>(0, 0).copy_from(&v);
        real.fixed_view_mut::<4, 4>(4, 4).copy_from(&v);
        real.fixed_view_mut::<4, 4>(0, 4).copy_from(&(-omega));
        real.fixed_view_mut::<4, 4>(4, 0).copy_from(&omega);
        real.symmetric_eigenvalues().min()
    }

    /// Applies the same phase-space rotation by `theta` (radians) to both
    /// modes: `exp(−Q_r θ)` with unit rotation frequency.
    pub fn rotated(&self, theta: f64) -> GaussianState {
        let (s, c) = theta.sin_cos();
        // exp(−Q_r θ) for Q_r = [[0, 1], [−1, 0]] per mode.
        let block = Matrix2::new(c, -s, s, c);
        let mut r = Matrix5::identity();
        r.fixed_view_mut::<2, 2>(0, 0).copy_from(&block);
        r.fixed_view_mut::<2, 2>(2, 2).copy_from(&block);
        let r4 = r.fixed_view::<4, 4>(0, 0).into_owned();
        GaussianState {
            mean: r4 * self.mean,
            cov: symmetrize(&(r * self.cov * r.transpose())),
            elapsed: self.elapsed,
            time_unit: self.time_unit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Block-exponential evaluation of the exact solution.
    Analytic,
    /// Classical 4th-order Runge–Kutta on the matrix ODE.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationReport {
    pub method: Method,
    /// Sub-steps (analytic) or RK4 steps taken.
    pub steps: u64,
    /// `max |V − Vᵀ|` before re-symmetrization.
    pub raw_symmetry_defect: f64,
    /// `max |V − Vᵀ|` of the returned covariance.
    pub max_symmetry_defect: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "propagation time must be finite and >= 0, got {t}"
        )))
    }
}

/// Noise-free mean evolution `⟨X⟩ ↦ e^{Q t}⟨X⟩`.
pub fn propagate_mean(state: &GaussianState, q: &Matrix4<f64>, t: f64) -> Result<GaussianState> {
    check_time(t)?;
    let mut out = state.clone();
    if t > 0.0 {
        out.mean = expm(q, t)? * state.mean;
    }
    out.elapsed += t * state.time_unit;
    Ok(out)
}

/// Largest damping rate `max |Re λ(Q)|`, which bounds the growth of `e^{−Qh}`
/// inside the block exponential.
fn stiffness(q: &Matrix5<f64>) -> f64 {
    q.complex_eigenvalues()
        .iter()
        .map(|e| e.re.abs())
        .fold(0.0, f64::max)
}

/// Exact covariance transition over `t`, as `(Φ, Σ)` with
/// `V(t) = Φ V Φᵀ + Σ`.
///
/// The block exponential loses everything to cancellation once `e^{−Qh}`
/// grows large, so `t` is cut into `n` equal sub-steps with
/// `max |Re λ(Q)|·h ≤ 1`; the sub-step transition is composed with itself by
/// repeated doubling.
pub fn covariance_transition(
    q: &Matrix5<f64>,
    n: &Matrix5<f64>,
    t: f64,
) -> Result<(Matrix5<f64>, Matrix5<f64>, u64)> {
    check_time(t)?;
    if t == 0.0 {
        return Ok((Matrix5::identity(), Matrix5::zeros(), 0));
    }
    let steps = (stiffness(q) * t).ceil().max(1.0);
    if steps > 1e15 {
        return Err(domain(
            "propagation interval too long for the block exponential",
        ));
    }
    let steps = steps as u64;
    let (phi, sigma) = van_loan(q, n, t / steps as f64)?;

    let compose = |(pa, sa): (Matrix5<f64>, Matrix5<f64>),
                   (pb, sb): (Matrix5<f64>, Matrix5<f64>)| {
        (pb * pa, symmetrize(&(pb * sa * pb.transpose() + sb)))
    };
    let mut acc = (Matrix5::identity(), Matrix5::zeros());
    let mut base = (phi, sigma);
    let mut k = steps;
    while k > 0 {
        if k & 1 == 1 {
            acc = compose(acc, base);
        }
        k >>= 1;
        if k > 0 {
            base = compose(base, base);
        }
    }
    Ok((acc.0, acc.1, steps))
}

/// `V(t) = e^{Q t} V e^{Qᵀ t} + ∫₀ᵗ e^{Q s} N e^{Qᵀ s} ds`, evaluated exactly
/// through the block exponential.
pub fn propagate_cov_analytic(
    state: &GaussianState,
    q: &Matrix5<f64>,
    n: &Matrix5<f64>,
    t: f64,
) -> Result<(GaussianState, PropagationReport)> {
    let (phi, sigma, steps) = covariance_transition(q, n, t)?;
    let raw = phi * state.cov * phi.transpose() + sigma;
    let cov = symmetrize(&raw);
    let mut out = state.clone();
    out.cov = cov;
    out.elapsed += t * state.time_unit;
    Ok((
        out,
        PropagationReport {
            method: Method::Analytic,
            steps,
            raw_symmetry_defect: symmetry_defect(&raw),
            max_symmetry_defect: symmetry_defect(&cov),
        },
    ))
}

/// Direct RK4 integration of `V̇ = QV + VQᵀ + N` with step at most `dt`.
pub fn propagate_cov_ode(
    state: &GaussianState,
    q: &Matrix5<f64>,
    n: &Matrix5<f64>,
    t: f64,
    dt: f64,
) -> Result<(GaussianState, PropagationReport)> {
    check_time(t)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(domain(format!("RK4 step must be > 0, got {dt}")));
    }
    let steps = if t == 0.0 {
        0
    } else {
        (t / dt).ceil().max(1.0) as u64
    };
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let qt = q.transpose();
    let rhs = |v: &Matrix5<f64>| q * v + v * qt + n;

    let mut v = state.cov;
    let mut raw_defect: f64 = 0.0;
    for _ in 0..steps {
        let k1 = rhs(&v);
        let k2 = rhs(&(v + k1 * (0.5 * h)));
        let k3 = rhs(&(v + k2 * (0.5 * h)));
        let k4 = rhs(&(v + k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        raw_defect = raw_defect.max(symmetry_defect(&v));
        v = symmetrize(&v);
    }
    let mut out = state.clone();
    out.cov = v;
    out.elapsed += t * state.time_unit;
    Ok((
        out,
        PropagationReport {
            method: Method::Rk4,
            steps,
            raw_symmetry_defect: raw_defect,
            max_symmetry_defect: symmetry_defect(&v),
        },
    ))
}

/// Means and covariance together over one segment; `elapsed` advances once.
pub fn propagate(
    state: &GaussianState,
    q: &Matrix5<f64>,
    n: &Matrix5<f64>,
    t: f64,
) -> Result<GaussianState> {
    let q4 = q.fixed_view::<4, 4>(0, 0).into_owned();
    let moved = propagate_mean(state, &q4, t)?;
    let (cov_state, _) = propagate_cov_analytic(state, q, n, t)?;
    Ok(GaussianState {
        cov: cov_state.cov,
        ..moved
    })
}
