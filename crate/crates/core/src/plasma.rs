//! Electron density profiles with helicoidal perturbations.
//!
//! The density is `n(φ, z) = n0 + Σ ñ_i cos(ℓ_i φ + q_i z + phase_i)`; there is
//! no radial dependence. With `m_e = 1` the unperturbed plasma frequency is
//! `ω_p0² = 4π n0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One helical density modulation `ñ cos(ℓ0 φ + q0 z + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicalTerm {
    pub n_tilde: f64,
    /// Winding number of the helix.
    pub ell0: i64,
    /// Helix step (inverse length).
    pub q0: f64,
    pub phase: f64,
}

impl HelicalTerm {
    pub fn new(n_tilde: f64, ell0: i64, q0: f64) -> Self {
        Self {
            n_tilde,
            ell0,
            q0,
            phase: 0.0,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    #[inline]
    pub fn argument(&self, phi: f64, z: f64) -> f64 {
        self.ell0 as f64 * phi + self.q0 * z + self.phase
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlasmaProfile {
    n0: f64,
    terms: Vec<HelicalTerm>,
}

impl PlasmaProfile {
    pub fn new(n0: f64, terms: Vec<HelicalTerm>) -> Result<Self> {
        if !(n0.is_finite() && n0 > 0.0) {
            return Err(Error::InvalidProfile(format!("n0 must be > 0, got {n0}")));
        }
        for t in &terms {
            if !(t.n_tilde.is_finite() && t.n_tilde >= 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "n_tilde must be >= 0, got {}",
                    t.n_tilde
                )));
            }
            if !(t.q0.is_finite() && t.phase.is_finite()) {
                return Err(Error::InvalidProfile("q0 and phase must be finite".into()));
            }
        }
        let sum: f64 = terms.iter().map(|t| t.n_tilde).sum();
        if sum >= n0 {
            return Err(Error::PerturbationExceedsDensity { sum, n0 });
        }
        Ok(Self { n0, terms })
    }

    /// Empty space, `ω_p ≡ 0`. The only profile allowed to have `n0 = 0`.
    pub fn vacuum() -> Self {
        Self {
            n0: 0.0,
            terms: Vec::new(),
        }
    }

    pub fn homogeneous(n0: f64) -> Result<Self> {
        Self::new(n0, Vec::new())
    }

    /// Profile whose unperturbed plasma frequency is `omega_p0`.
    pub fn from_plasma_frequency(omega_p0: f64, terms: Vec<HelicalTerm>) -> Result<Self> {
        Self::new(omega_p0 * omega_p0 / (4.0 * PI), terms)
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn terms(&self) -> &[HelicalTerm] {
        &self.terms
    }

    /// `Σ ñ_i`.
    pub fn total_amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.n_tilde).sum()
    }

    /// True when every perturbation amplitude is zero.
    pub fn is_homogeneous(&self) -> bool {
        self.terms.iter().all(|t| t.n_tilde == 0.0)
    }

    pub fn omega_p0_sq(&self) -> f64 {
        4.0 * PI * self.n0
    }

    pub fn omega_p0(&self) -> f64 {
        self.omega_p0_sq().sqrt()
    }

    /// Density perturbation `Σ ñ_i cos(...)` in absolute units.
    pub fn delta_n(&self, phi: f64, z: f64) -> f64 {
        self.terms.iter().map(|t| t.n_tilde * t.argument(phi, z).cos()).sum()
    }

    /// Total electron density `n0 (1 + η)`.
    pub fn density(&self, phi: f64, z: f64) -> f64 {
        self.n0 + self.delta_n(phi, z)
    }

    /// Relative perturbation η. `r` is accepted for the cylindrical
    /// signature but the helicoidal modulation does not depend on it.
    pub fn eta(&self, _r: f64, phi: f64, z: f64) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        self.delta_n(phi, z) / self.n0
    }

    /// Local `ω_p² = ω_p0² (1 + η)`, strictly positive for a valid profile.
    pub fn plasma_freq_sq(&self, r: f64, phi: f64, z: f64) -> f64 {
        self.omega_p0_sq() * (1.0 + self.eta(r, phi, z))
    }

    /// Amplitude-weighted superposition `Σ w_i cos(...)`, `w_i = ñ_i / Σ ñ_j`,
    /// so that `(Σ ñ_j) · f` reproduces the density perturbation.
    pub fn f_general(&self, phi: f64, z: f64) -> Result<f64> {
        if self.terms.is_empty() {
            return Err(Error::InvalidArgument(
                "f_general needs at least one perturbation term".into(),
            ));
        }
        let total = self.total_amplitude();
        if total == 0.0 {
            // All amplitudes zero: equal weights keep f bounded by 1.
            let n = self.terms.len() as f64;
            return Ok(self.terms.iter().map(|t| t.argument(phi, z).cos()).sum::<f64>() / n);
        }
        Ok(self.delta_n(phi, z) / total)
    }
}
