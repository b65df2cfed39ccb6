use nalgebra::{Matrix5, Vector4};
use omem::model::{CouplingPhase, NoiseSpec, PhysicalParams};
use omem::protocol::Psi0Mode;
use omem::stochastic::{ou_path, simulate_trajectories, TrajectoryConfig};
use omem::{drift_matrix_mean, propagate_mean, Error, GaussianState};

/// Everything in units of ω_m, with ω_m = 1 rad/s.
fn unit_params() -> PhysicalParams {
    PhysicalParams {
        omega_m: 1.0,
        kappa: 0.1,
        gamma: 0.01,
        g0: 0.02,
        alpha_s: 10.0,
        n_m: 2.0,
        n_c: 0.3,
        noise: NoiseSpec::colored(1e-3, 0.1),
    }
}

fn start() -> GaussianState {
    let mut cov = Matrix5::identity() * 0.25;
    cov[(0, 0)] = 1.25;
    cov[(1, 1)] = 1.25;
    cov[(4, 4)] = 1e-4;
    GaussianState::new(Vector4::new(0.0, 0.0, 1.0, 0.0), cov, 1.0)
}

fn cfg(dt: f64, n_traj: usize, seed: u64) -> TrajectoryConfig {
    TrajectoryConfig {
        dt,
        n_steps: 0,
        n_traj,
        seed,
    }
}

#[test]
fn ou_stationary_variance() {
    let noise = NoiseSpec::colored(2.0, 5.0);
    let path = ou_path(&noise, 10.0 / 5.0, 100_000, 9, Psi0Mode::Stationary).unwrap();
    let n = path.len() as f64;
    let mean = path.iter().sum::<f64>() / n;
    let var = path.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let stderr = var * (2.0 / n).sqrt();
    assert!((var - 10.0).abs() < 3.0 * stderr, "{var}");
}

#[test]
fn ou_autocorrelation() {
    let gc = 2.0;
    let dt = 0.05 / gc;
    let noise = NoiseSpec::colored(1.0, gc);
    let path = ou_path(&noise, dt, 400_000, 3, Psi0Mode::Stationary).unwrap();
    let var = path.iter().map(|v| v * v).sum::<f64>() / path.len() as f64;
    for k in [1usize, 10, 20] {
        let c =
            path.iter().zip(&path[k..]).map(|(a, b)| a * b).sum::<f64>() / (path.len() - k) as f64;
        let want = (-gc * k as f64 * dt).exp();
        assert!(
            (c / var - want).abs() < 0.03,
            "lag {k}: {} vs {want}",
            c / var
        );
    }
}

#[test]
fn ou_path_edge_cases() {
    let quiet = NoiseSpec::colored(0.0, 3.0);
    let path = ou_path(&quiet, 0.01, 100, 1, Psi0Mode::PaperQuarter).unwrap();
    assert_eq!(path.len(), 101);
    assert!(path.iter().all(|&v| v == 0.0));
    assert!(ou_path(
        &NoiseSpec::white_exact(1.0),
        0.01,
        10,
        1,
        Psi0Mode::Stationary
    )
    .is_err());
    let a = ou_path(
        &NoiseSpec::colored(1.0, 1.0),
        0.1,
        50,
        7,
        Psi0Mode::Stationary,
    )
    .unwrap();
    let b = ou_path(
        &NoiseSpec::colored(1.0, 1.0),
        0.1,
        50,
        7,
        Psi0Mode::Stationary,
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn seeds_are_deterministic_and_thread_independent() {
    let p = unit_params();
    let phases = [(CouplingPhase::Write, 2.0)];
    let c = cfg(1e-2, 64, 42);
    let a = simulate_trajectories(&p, &start(), &phases, &c).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b = pool.install(|| simulate_trajectories(&p, &start(), &phases, &c).unwrap());
    assert_eq!(a, b);
    let other = simulate_trajectories(&p, &start(), &phases, &cfg(1e-2, 64, 43)).unwrap();
    assert_ne!(a.mean, other.mean);
}

#[test]
fn stderr_shrinks_as_inverse_root_n() {
    let p = unit_params();
    let phases = [(CouplingPhase::Write, 1.0)];
    let errs: Vec<f64> = [1250, 5000, 20000]
        .iter()
        .map(|&n| {
            simulate_trajectories(&p, &start(), &phases, &cfg(1e-2, n, 5))
                .unwrap()
                .stderr_cov[(2, 2)]
        })
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.7..2.3).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn two_trajectories_still_give_errors() {
    let p = unit_params();
    let m = simulate_trajectories(
        &p,
        &start(),
        &[(CouplingPhase::Write, 0.5)],
        &cfg(1e-2, 2, 1),
    )
    .unwrap();
    assert!(m.stderr_mean.iter().all(|&v| v > 0.0));
    assert!(m.stderr_cov[(2, 2)] > 0.0);
    assert_eq!(m.cov, m.cov.transpose());
}

#[test]
fn cavity_relaxes_to_its_bath() {
    let p = PhysicalParams {
        alpha_s: 0.0,
        noise: NoiseSpec::none(),
        kappa: 0.5,
        ..unit_params()
    };
    let m = simulate_trajectories(
        &p,
        &start(),
        &[(CouplingPhase::Store, 30.0)],
        &cfg(2e-3, 4000, 11),
    )
    .unwrap();
    let want = (1.0 + 2.0 * p.n_c) / 4.0;
    for i in [2, 3] {
        assert!(
            (m.cov[(i, i)] - want).abs() < 3.0 * m.stderr_cov[(i, i)],
            "{} vs {want}",
            m.cov[(i, i)]
        );
    }
}

#[test]
fn euler_bias_halves_with_dt() {
    // No diffusion and a sharp initial state: every trajectory is the
    // deterministic Euler solution.
    let p = PhysicalParams {
        n_m: 0.0,
        n_c: 0.0,
        gamma: 0.0,
        kappa: 0.0,
        noise: NoiseSpec::none(),
        ..unit_params()
    };
    let s = GaussianState::new(Vector4::new(0.3, 0.0, 1.0, 0.0), Matrix5::zeros(), 1.0);
    let t = 5.0;
    let exact =
        propagate_mean(&s, &drift_matrix_mean(&p.scaled(), CouplingPhase::Write), t).unwrap();
    let bias = |dt: f64| {
        let m =
            simulate_trajectories(&p, &s, &[(CouplingPhase::Write, t)], &cfg(dt, 2, 1)).unwrap();
        (m.mean - exact.mean).amax()
    };
    let (b1, b2) = (bias(1e-2), bias(5e-3));
    assert!(b2 < b1 && (1.7..2.3).contains(&(b1 / b2)), "{b1} {b2}");
}

#[test]
fn oversized_step_blows_up() {
    let p = unit_params();
    let err = simulate_trajectories(
        &p,
        &start(),
        &[(CouplingPhase::Write, 2000.0)],
        &cfg(2.0, 4, 1),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Numerical(_)), "{err}");
}

#[test]
fn rejects_bad_configs() {
    let p = unit_params();
    assert!(simulate_trajectories(&p, &start(), &[], &cfg(0.0, 10, 1)).is_err());
    assert!(simulate_trajectories(&p, &start(), &[], &cfg(0.1, 1, 1)).is_err());
    let white = PhysicalParams {
        noise: NoiseSpec::white_exact(1e-3),
        ..p
    };
    assert!(matches!(
        simulate_trajectories(&white, &start(), &[], &cfg(0.1, 10, 1)),
        Err(Error::Config(_))
    ));
}
