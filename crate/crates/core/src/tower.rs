//! Majorana tower: `μ(j) = m* / (j + ½)` over bosonic (`j = 1, 2, …`) or
//! fermionic (`j = ½, 3/2, …`) spins.

use std::fmt;

use crate::error::{Error, Result};
use crate::proca_mass::sigma_extract;

/// Spin stored as twice its value so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn is_half_integer(self) -> bool {
        self.twice % 2 == 1
    }

    /// Reduced fraction `(numerator, denominator)`.
    pub fn as_fraction(self) -> (u32, u32) {
        if self.is_half_integer() {
            (self.twice, 2)
        } else {
            (self.twice / 2, 1)
        }
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// `2j + 1`, the exact integer behind `j + ½`.
    pub fn multiplicity(self) -> u32 {
        self.twice + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_fraction() {
            (n, 1) => write!(f, "{n}"),
            (n, d) => write!(f, "{n}/{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TowerKind {
    Bosonic,
    Fermionic,
}

impl std::str::FromStr for TowerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bosonic" => Ok(TowerKind::Bosonic),
            "fermionic" => Ok(TowerKind::Fermionic),
            other => Err(Error::InvalidArgument(format!("unknown tower kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TowerEntry {
    pub j: Spin,
    pub mu: f64,
    pub m_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TowerOptions {
    /// Start the bosonic ladder at `j = 0` instead of `j = 1`.
    pub include_zero: bool,
}

pub fn tower_spectrum(m_star: f64, kind: TowerKind, max_levels: usize) -> Result<Vec<TowerEntry>> {
    tower_spectrum_with(m_star, kind, max_levels, TowerOptions::default())
}

pub fn tower_spectrum_with(
    m_star: f64,
    kind: TowerKind,
    max_levels: usize,
    opts: TowerOptions,
) -> Result<Vec<TowerEntry>> {
    if !(m_star.is_finite() && m_star > 0.0) {
        return Err(Error::InvalidArgument(format!("m* must be > 0, got {m_star}")));
    }
    if max_levels == 0 {
        return Err(Error::InvalidArgument("max_levels must be >= 1".into()));
    }
    let first_twice = match (kind, opts.include_zero) {
        (TowerKind::Fermionic, _) => 1,
        (TowerKind::Bosonic, false) => 2,
        (TowerKind::Bosonic, true) => 0,
    };
    Ok((0..max_levels as u32)
        .map(|level| {
            let j = Spin::from_twice(first_twice + 2 * level);
            TowerEntry {
                j,
                mu: 2.0 * m_star / j.multiplicity() as f64,
                m_star,
            }
        })
        .collect())
}

/// Generalized tower level of a photon in plasma: the `Σ` with
/// `μ_γ = m*/(Σ + ½)`, spin replaced by total angular momentum.
pub fn plasma_tower_level(mu_gamma: f64, m_star: f64) -> Result<f64> {
    sigma_extract(mu_gamma, m_star)
}
