//! Numerical engine for the effective (Proca) mass acquired by photons in
//! plasmas carrying helicoidal density structure.
//!
//! The crate is split along the physics:
//!
//! - [`algebra`]: Lorentz generators, their commutators, the photon
//!   Hamiltonian and a Dirac mass-shell check.
//! - [`rs_field`]: Riemann-Silberstein photon field on a periodic grid with
//!   exact mode-space evolution.
//! - [`plasma`]: density profiles and the local plasma frequency.
//! - [`proca_mass`]: closed-form Proca mass expressions and positivity.
//! - [`tower`]: Majorana tower spectrum and its plasma extension.
//! - [`dispersion`]: Klein-Gordon propagator, dispersion measurement and
//!   OAM mode coupling.
//!
//! Natural units throughout (`e = c = ħ = 1`, electron mass 1), so that
//! `ω_p0² = 4π n0`.

pub mod algebra;
pub mod dispersion;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod plasma;
pub mod proca_mass;
pub mod rs_field;
pub mod tower;

pub use error::{Error, Result};
