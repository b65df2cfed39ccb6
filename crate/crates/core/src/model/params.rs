use crate::error::{domain, Error, Result};

/// How the laser frequency noise `ψ = φ̇` is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseMode {
    /// Ornstein–Uhlenbeck noise with cutoff `γ_c`, carried as the fifth state
    /// component.
    Colored,
    /// δ-correlated limit: `2Γ_L α_s²` is injected straight into the `p₂`
    /// diffusion and `ψ` stays identically zero. Requires `γ_c = 0`.
    WhiteExact,
    /// No control-laser noise. Equivalent to `Γ_L = 0`.
    NoNoise,
}

/// Laser phase-noise description. `gamma_l` is the linewidth `Γ_L` and
/// `gamma_c` the frequency-noise cutoff, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub gamma_l: f64,
    pub gamma_c: f64,
    pub mode: NoiseMode,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            gamma_l: 0.0,
            gamma_c: 0.0,
            mode: NoiseMode::NoNoise,
        }
    }

    pub fn colored(gamma_l: f64, gamma_c: f64) -> Self {
        Self {
            gamma_l,
            gamma_c,
            mode: NoiseMode::Colored,
        }
    }

    pub fn white_exact(gamma_l: f64) -> Self {
        Self {
            gamma_l,
            gamma_c: 0.0,
            mode: NoiseMode::WhiteExact,
        }
    }

    /// True when the control laser actually injects noise.
    pub fn is_active(&self) -> bool {
        self.mode != NoiseMode::NoNoise && self.gamma_l > 0.0
    }

    /// Linewidth with `NoNoise` folded in as `Γ_L = 0`.
    pub fn effective_linewidth(&self) -> f64 {
        if self.mode == NoiseMode::NoNoise {
            0.0
        } else {
            self.gamma_l
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_l.is_finite() && self.gamma_l >= 0.0) {
            return Err(domain(format!(
                "GammaL must be finite and >= 0, got {}",
                self.gamma_l
            )));
        }
        if !(self.gamma_c.is_finite() && self.gamma_c >= 0.0) {
            return Err(domain(format!(
                "gammac must be finite and >= 0, got {}",
                self.gamma_c
            )));
        }
        if self.mode == NoiseMode::WhiteExact && self.gamma_c != 0.0 {
            return Err(Error::Config(
                "white-exact noise and a finite cutoff gammac are mutually exclusive".into(),
            ));
        }
        Ok(())
    }
}

/// The three coupling segments of the storage protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingPhase {
    /// Coupling `+G`.
    Write,
    /// Coupling switched off.
    Store,
    /// Coupling `−G` (read pulse π out of phase with the write pulse).
    Read,
}

impl CouplingPhase {
    pub fn sign(self) -> f64 {
        match self {
            CouplingPhase::Write => 1.0,
            CouplingPhase::Store => 0.0,
            CouplingPhase::Read => -1.0,
        }
    }
}

/// One cavity / oscillator / laser configuration. All rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub omega_m: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub g0: f64,
    /// Steady intracavity amplitude, real by choice of the input laser phase.
    pub alpha_s: f64,
    pub n_m: f64,
    pub n_c: f64,
    pub noise: NoiseSpec,
}

impl PhysicalParams {
    /// Effective optomechanical coupling `G = g₀ α_s`.
    pub fn coupling(&self) -> f64 {
        self.g0 * self.alpha_s
    }

    /// Sets `G` directly; the intracavity amplitude becomes `G / g₀`.
    pub fn with_coupling(mut self, coupling: f64) -> Result<Self> {
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(domain(format!("G must be finite and >= 0, got {coupling}")));
        }
        if self.g0 <= 0.0 {
            if coupling == 0.0 {
                self.alpha_s = 0.0;
                return Ok(self);
            }
            return Err(Error::Config(
                "G given directly needs g0 > 0 to recover alpha_s = G/g0".into(),
            ));
        }
        self.alpha_s = coupling / self.g0;
        Ok(self)
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = noise;
        self
    }

    /// Mechanical quality factor `ω_m / γ`.
    pub fn quality_factor(&self) -> f64 {
        self.omega_m / self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m.is_finite() && self.omega_m > 0.0) {
            return Err(domain(format!(
                "omega_m must be finite and > 0, got {}",
                self.omega_m
            )));
        }
        // kappa = 0 is admitted for the lossless swap limit.
        let non_negative = [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("g0", self.g0),
            ("alpha_s", self.alpha_s),
            ("N_m", self.n_m),
            ("N_C", self.n_c),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        self.noise.validate()
    }

    /// `κ ≥ ω_m` leaves the resolved-sideband regime the beam-splitter
    /// dynamics assumes. Reported, never rejected.
    pub fn resolved_sideband_warning(&self) -> Option<String> {
        (self.kappa >= self.omega_m).then(|| {
            format!(
                "kappa ({:.4e} rad/s) >= omega_m ({:.4e} rad/s): outside the resolved-sideband regime",
                self.kappa, self.omega_m
            )
        })
    }

    /// Copy expressed in units of `ω_m`: every rate divided by `ω_m`,
    /// occupancies and `α_s` unchanged. `ψ` is measured in units of `ω_m`
    /// too, which keeps `−α_s` as its coupling into `p₂`.
    pub fn scaled(&self) -> PhysicalParams {
        let w = self.omega_m;
        PhysicalParams {
            omega_m: 1.0,
            kappa: self.kappa / w,
            gamma: self.gamma / w,
            g0: self.g0 / w,
            alpha_s: self.alpha_s,
            n_m: self.n_m,
            n_c: self.n_c,
            noise: NoiseSpec {
                gamma_l: self.noise.gamma_l / w,
                gamma_c: self.noise.gamma_c / w,
                mode: self.noise.mode,
            },
        }
    }
}
