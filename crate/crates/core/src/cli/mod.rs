//! Configuration, presets, sweeps and reports behind the `omem` binary.

pub mod calibration;
pub mod config;
pub mod montecarlo;
pub mod presets;
pub mod sweep;
pub mod units;

pub use config::{Config, ConfigError, Scenario};
pub use montecarlo::{run_montecarlo, MomentComparison, MonteCarloReport};
pub use presets::{preset, Preset, PRESET_NAMES};
pub use sweep::{figure, run_sweep, Figure, ResultRow, Spacing, SweepAxis, SweepRange, SweepSpec};
pub use units::FrequencyConvention;
