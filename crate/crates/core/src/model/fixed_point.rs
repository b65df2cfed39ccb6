use num_complex::Complex64;

use super::matrices::drift_matrix_full;
use super::params::PhysicalParams;
use crate::error::{domain, Error, Result};

/// A steady state of the driven cavity–oscillator system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    /// Intracavity amplitude before the laser phase is chosen to make it real.
    pub alpha: Complex64,
    /// Mechanical displacement amplitude.
    pub beta: Complex64,
    /// Intracavity photon number `|α|²`.
    pub intensity: f64,
    /// Effective detuning `Δ = Δ₀ − g₀(β + β*)` in rad/s.
    pub detuning: f64,
    pub stable: bool,
    /// Largest relative residual of the two steady-state equations.
    pub residual: f64,
}

impl FixedPoint {
    /// Real amplitude `α_s = |α|` after choosing the input laser phase.
    pub fn alpha_s(&self) -> f64 {
        self.intensity.sqrt()
    }
}

/// Coefficients `[c₀, c₁, c₂, c₃]` of the cubic in `u = |α|²`:
/// `u·[(Δ₀ − η u)² + κ²/4] − E_L² = 0` with `η = 2g₀²ω_m/(ω_m² + γ²/4)`.
pub fn fixed_point_cubic(params: &PhysicalParams, e_l: f64, delta_0: f64) -> [f64; 4] {
    let eta = radiation_shift(params);
    [
        -e_l * e_l,
        delta_0 * delta_0 + 0.25 * params.kappa * params.kappa,
        -2.0 * delta_0 * eta,
        eta * eta,
    ]
}

/// Detuning shift per intracavity photon, `g₀(β + β*) / |α|²`.
fn radiation_shift(params: &PhysicalParams) -> f64 {
    let w = params.omega_m;
    2.0 * params.g0 * params.g0 * w / (w * w + 0.25 * params.gamma * params.gamma)
}

/// All non-negative fixed points for drive amplitude `e_l` and bare detuning
/// `delta_0` (both rad/s), sorted by increasing intensity. `params.alpha_s`
/// is ignored. Stability uses the non-RWA drift at each root's own effective
/// detuning.
pub fn fixed_points(params: &PhysicalParams, e_l: f64, delta_0: f64) -> Result<Vec<FixedPoint>> {
    if !(e_l.is_finite() && e_l >= 0.0) {
        return Err(domain(format!("E_L must be finite and >= 0, got {e_l}")));
    }
    if !delta_0.is_finite() {
        return Err(domain("Delta_0 must be finite"));
    }
    let mut probe = *params;
    probe.alpha_s = 0.0;
    probe.validate()?;

    // Solve in ω_m units so the coefficients stay O(1)-ish.
    let s = params.scaled();
    let e = e_l / params.omega_m;
    let d0 = delta_0 / params.omega_m;
    let coeffs = fixed_point_cubic(&s, e, d0);
    let roots = non_negative_roots(coeffs);
    assert!(
        !roots.is_empty(),
        "a cubic with f(0) <= 0 and positive leading coefficient has a non-negative root"
    );

    let eta = radiation_shift(&s);
    let mut out = Vec::with_capacity(roots.len());
    for u in roots {
        let beta = Complex64::i() * s.g0 * u / Complex64::new(0.5 * s.gamma, s.omega_m);
        let detuning = d0 - eta * u;
        let alpha = Complex64::new(e, 0.0) / Complex64::new(0.5 * s.kappa, detuning);

        let r_alpha = {
            let d_eff = d0 - s.g0 * 2.0 * beta.re;
            let lhs = alpha * Complex64::new(0.5 * s.kappa, d_eff);
            (lhs - e).norm() / (e + lhs.norm()).max(1.0)
        };
        let r_beta = {
            let lhs = beta * Complex64::new(0.5 * s.gamma, s.omega_m);
            let rhs = Complex64::i() * s.g0 * alpha.norm_sqr();
            (lhs - rhs).norm() / (lhs.norm() + rhs.norm()).max(1.0)
        };

        let mut lin = s;
        lin.alpha_s = alpha.norm();
        let stable = drift_matrix_full(&lin, detuning)
            .complex_eigenvalues()
            .iter()
            .all(|ev| ev.re < 0.0);

        out.push(FixedPoint {
            alpha,
            beta,
            intensity: alpha.norm_sqr(),
            detuning: detuning * params.omega_m,
            stable,
            residual: r_alpha.max(r_beta),
        });
    }
    Ok(out)
}

/// The highest-intensity stable root.
pub fn select_fixed_point(points: &[FixedPoint]) -> Result<FixedPoint> {
    points
        .iter()
        .filter(|p| p.stable)
        .max_by(|a, b| a.intensity.total_cmp(&b.intensity))
        .copied()
        .ok_or_else(|| Error::Unstable("no stable fixed point for this drive and detuning".into()))
}

fn eval(c: &[f64; 4], u: f64) -> f64 {
    ((c[3] * u + c[2]) * u + c[1]) * u + c[0]
}

fn eval_deriv(c: &[f64; 4], u: f64) -> f64 {
    (3.0 * c[3] * u + 2.0 * c[2]) * u + c[1]
}

/// Real roots in `[0, ∞)` of a cubic with `c₀ ≤ 0` and `c₃ ≥ 0`, found by
/// bracketing between the critical points and refining with bisection then
/// Newton.
fn non_negative_roots(c: [f64; 4]) -> Vec<f64> {
    if c[0] == 0.0 {
        // u = 0 is a root; the remaining quadratic has no positive roots
        // unless κ = 0, which the drift treats as the marginal case anyway.
        let mut roots = vec![0.0];
        let q = [c[1], c[2], c[3]];
        roots.extend(positive_quadratic_roots(q));
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        return roots;
    }
    if c[3] == 0.0 && c[2] == 0.0 {
        return if c[1] > 0.0 {
            vec![-c[0] / c[1]]
        } else {
            vec![]
        };
    }

    let mut breaks = vec![0.0];
    let (a, b, cc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    let disc = b * b - 4.0 * a * cc;
    if a > 0.0 && disc > 0.0 {
        let sq = disc.sqrt();
        let mut crit = [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)];
        crit.sort_by(f64::total_cmp);
        breaks.extend(crit.iter().copied().filter(|&x| x > 0.0));
    }
    let mut hi = breaks.last().copied().unwrap_or(0.0).max(1.0);
    while eval(&c, hi) <= 0.0 {
        hi *= 2.0;
    }
    breaks.push(hi);

    let mut roots = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (eval(&c, lo), eval(&c, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        roots.push(refine(&c, lo, hi));
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    roots
}

fn positive_quadratic_roots(q: [f64; 3]) -> Vec<f64> {
    let (c0, c1, c2) = (q[0], q[1], q[2]);
    if c2 == 0.0 {
        return if c1 != 0.0 && -c0 / c1 > 0.0 {
            vec![-c0 / c1]
        } else {
            vec![]
        };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    [(-c1 - sq) / (2.0 * c2), (-c1 + sq) / (2.0 * c2)]
        .into_iter()
        .filter(|&x| x > 0.0)
        .collect()
}

fn refine(c: &[f64; 4], mut lo: f64, mut hi: f64) -> f64 {
    let flo_sign = eval(c, lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if eval(c, mid).signum() == flo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = eval_deriv(c, u);
        if d == 0.0 {
            break;
        }
        let next = u - eval(c, u) / d;
        if !(next >= lo && next <= hi) {
            break;
        }
        u = next;
    }
    u
}
