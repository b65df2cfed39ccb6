//! Gaussian covariance-matrix simulator for opto/electromechanical quantum
//! memories driven by a control laser with colored phase noise.
//!
//! The engine tracks the quadrature means and the symmetrized covariance of a
//! mechanical mode, a cavity mode and an auxiliary frequency-noise variable
//! `ψ = φ̇`. The state vector order is `(x₁, p₁, x₂, p₂, ψ)`: index 0–1 is the
//! mechanical mode, 2–3 the optical mode and 4 the laser frequency noise. This
//! order is part of the public contract for every matrix in the crate.
//!
//! Quadratures follow `x = (a + a†)/2`, `p = (a − a†)/(2i)`, so the vacuum has
//! variance ¼ per quadrature.
//!
//! All rates are stored in rad/s. Before propagation everything is expressed
//! in units of the mechanical frequency (`ω_m = 1`), see
//! [`PhysicalParams::scaled`].

pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod propagate;
pub mod protocol;
pub mod stochastic;

pub use error::{Error, Result};
pub use model::{
    diffusion_matrix, drift_matrix, drift_matrix_full, drift_matrix_mean, fixed_points,
    rotation_generator, select_fixed_point, thermal_occupation, CouplingPhase, DriftSet,
    FixedPoint, NoiseMode, NoiseSpec, PhysicalParams,
};
pub use propagate::{
    propagate_cov_analytic, propagate_cov_ode, propagate_mean, GaussianState, Method,
    PropagationReport,
};
pub use protocol::{
    evaluate, fidelity, initial_state, rotate_compensate, run_protocol, FidelityResult, InputState,
    ProtocolOutcome, ProtocolSpec, Psi0Mode, RotationMode, StoreCoupling,
};
