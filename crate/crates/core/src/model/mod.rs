//! Physical parameters and every matrix the covariance formalism needs.

mod fixed_point;
mod matrices;
mod params;
mod thermal;

pub use fixed_point::{fixed_point_cubic, fixed_points, select_fixed_point, FixedPoint};
pub use matrices::{
    diffusion_matrix, drift_matrix, drift_matrix_full, drift_matrix_mean, rotation_generator,
    DriftSet, OPTICAL_P, PSI,
};
pub use params::{CouplingPhase, NoiseMode, NoiseSpec, PhysicalParams};
pub use thermal::thermal_occupation;
