//! Closed-form effective Proca mass of a photon in a helicoidally perturbed
//! plasma.
//!
//! Notation used below: `E` is the field amplitude, `g = v̂·∇Φ`, `δv̇` the
//! electron acceleration magnitude, `box = |v| v̂·□∇Φ` (supplied as one
//! scalar), `n = n0 (1 + η)` the local density and `ω_p0² = 4π n0`.
//!
//! The squared-mass expression ([`mu_sq_eq2`]) is canonical. The other forms
//! are kept verbatim so their mutual consistency can be measured:
//!
//! | id     | form |
//! |--------|------|
//! | `Eq1`  | `μ = [1/(1+g/E)] √(ω_p² − 4π(n δv̇ − box)/E)` |
//! | `Eq2`  | `μ² = [E/(E+g)] ω_p0²(1+η) − [1/(E+g)] (4π δv̇ n − 4π box)` |
//! | `Eq11` | `μ = ω_p0 A √(1 − [4π δv̇/(E+g)] (n0 + ñ f)/(ω_p0² A²))` |
//! | `Eq12` | `μ = (E+g) / [ω_p0 A (E+g) + 4π δv̇ (n0 + ñ f)]` |

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::plasma::PlasmaProfile;

const FOUR_PI: f64 = 4.0 * PI;

/// Cylindrical evaluation point `(r, φ, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalPoint {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcaInputs {
    pub e_amp: f64,
    pub grad_phi_par: f64,
    pub delta_v_dot: f64,
    pub box_grad_phi_par: f64,
    pub profile: PlasmaProfile,
    pub at: EvalPoint,
}

impl ProcaInputs {
    /// Unperturbed electron motion: only `E` and the profile are set.
    pub fn at_rest(e_amp: f64, profile: PlasmaProfile) -> Self {
        Self {
            e_amp,
            grad_phi_par: 0.0,
            delta_v_dot: 0.0,
            box_grad_phi_par: 0.0,
            profile,
            at: EvalPoint::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.e_amp, self.grad_phi_par, self.delta_v_dot, self.box_grad_phi_par];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("Proca inputs must be finite".into()));
        }
        if self.e_amp <= 0.0 {
            return Err(Error::InvalidArgument(format!("E_amp must be > 0, got {}", self.e_amp)));
        }
        if self.delta_v_dot < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "delta_v_dot must be >= 0, got {}",
                self.delta_v_dot
            )));
        }
        Ok(())
    }

    /// `E + g`, rejecting the singular case.
    pub fn denominator(&self) -> Result<f64> {
        self.validate()?;
        let d = self.e_amp + self.grad_phi_par;
        if d == 0.0 {
            return Err(Error::SingularDenominator("E + v̂·∇Φ = 0".into()));
        }
        Ok(d)
    }

    pub fn eta(&self) -> f64 {
        self.profile.eta(self.at.r, self.at.phi, self.at.z)
    }

    /// `n(r) = n0 (1 + η)` at the evaluation point.
    pub fn density(&self) -> f64 {
        self.profile.density(self.at.phi, self.at.z)
    }

    /// Small-perturbation regime: `δv̇ · 4π n ≤ ½ E ω_p0²`.
    pub fn in_regime(&self) -> bool {
        self.delta_v_dot.abs() * FOUR_PI * self.density() <= 0.5 * self.e_amp * self.profile.omega_p0_sq()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    Eq1,
    Eq2,
    Eq11,
    Eq12,
}

impl FormulaId {
    pub const ALL: [FormulaId; 4] = [FormulaId::Eq1, FormulaId::Eq2, FormulaId::Eq11, FormulaId::Eq12];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::Eq1 => "EQ1",
            FormulaId::Eq2 => "EQ2",
            FormulaId::Eq11 => "EQ11",
            FormulaId::Eq12 => "EQ12",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassResult {
    pub mu_sq: f64,
    /// `√mu_sq`, or `None` when `mu_sq < 0`.
    pub mu: Option<f64>,
    pub formula: FormulaId,
    pub in_regime: bool,
}

impl MassResult {
    fn from_mu_sq(mu_sq: f64, formula: FormulaId, in_regime: bool) -> Self {
        let mu = (mu_sq >= 0.0).then(|| mu_sq.sqrt());
        Self {
            mu_sq,
            mu,
            formula,
            in_regime,
        }
    }

    fn from_mu(mu: f64, formula: FormulaId, in_regime: bool) -> Self {
        Self {
            mu_sq: mu * mu,
            mu: Some(mu),
            formula,
            in_regime,
        }
    }
}

pub fn mu_sq_eq2(input: &ProcaInputs) -> Result<MassResult> {
    let d = input.denominator()?;
    let e = input.e_amp;
    let w0 = input.profile.omega_p0_sq();
    let mu_sq = e / d * w0 * (1.0 + input.eta())
        - (FOUR_PI * input.delta_v_dot * input.density() - FOUR_PI * input.box_grad_phi_par) / d;
    Ok(MassResult::from_mu_sq(mu_sq, FormulaId::Eq2, input.in_regime()))
}

/// Linear-prefactor form. A negative radicand yields `mu = None` with
/// `mu_sq = prefactor² · radicand`.
pub fn mu_eq1(input: &ProcaInputs) -> Result<MassResult> {
    input.denominator()?;
    let e = input.e_amp;
    let prefactor = 1.0 / (1.0 + input.grad_phi_par / e);
    let omega_p_sq = input.profile.plasma_freq_sq(input.at.r, input.at.phi, input.at.z);
    let radicand = omega_p_sq - (FOUR_PI * input.delta_v_dot * input.density() - FOUR_PI * input.box_grad_phi_par) / e;
    let mu_sq = prefactor * prefactor * radicand;
    let mu = (radicand >= 0.0).then(|| prefactor * radicand.sqrt());
    Ok(MassResult {
        mu_sq,
        mu,
        formula: FormulaId::Eq1,
        in_regime: input.in_regime(),
    })
}

/// `A = √[E(1+η)/(E+g)]`, chosen so that the `A`-form reproduces the
/// squared-mass expression without the `box` term.
pub fn a_factor(input: &ProcaInputs) -> Result<f64> {
    let d = input.denominator()?;
    if d <= 0.0 {
        return Err(Error::SingularDenominator(format!("E + v̂·∇Φ must be > 0, got {d}")));
    }
    let one_plus_eta = 1.0 + input.eta();
    if one_plus_eta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "1 + eta must be > 0, got {one_plus_eta}"
        )));
    }
    Ok((input.e_amp * one_plus_eta / d).sqrt())
}

/// `n0 + ñ f`, which for any superposition equals the local density.
fn perturbed_density(input: &ProcaInputs) -> f64 {
    let p = &input.profile;
    match p.f_general(input.at.phi, input.at.z) {
        Ok(f) => p.n0() + p.total_amplitude() * f,
        Err(_) => p.n0(),
    }
}

pub fn mu_eq11(input: &ProcaInputs) -> Result<MassResult> {
    let a = a_factor(input)?;
    let d = input.e_amp + input.grad_phi_par;
    let w0_sq = input.profile.omega_p0_sq();
    let scale = input.profile.omega_p0() * a;
    let radicand = 1.0 - FOUR_PI * input.delta_v_dot / d * perturbed_density(input) / (w0_sq * a * a);
    let in_regime = input.in_regime();
    if radicand < 0.0 {
        return Ok(MassResult {
            mu_sq: scale * scale * radicand,
            mu: None,
            formula: FormulaId::Eq11,
            in_regime,
        });
    }
    Ok(MassResult::from_mu(scale * radicand.sqrt(), FormulaId::Eq11, in_regime))
}

/// Approximate mass/angular-momentum form, evaluated exactly as written.
pub fn mu_eq12(input: &ProcaInputs) -> Result<MassResult> {
    let a = a_factor(input)?;
    let d = input.e_amp + input.grad_phi_par;
    let denom = input.profile.omega_p0() * a * d + FOUR_PI * input.delta_v_dot * perturbed_density(input);
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::SingularDenominator(format!("non-positive denominator {denom}")));
    }
    Ok(MassResult::from_mu(d / denom, FormulaId::Eq12, input.in_regime()))
}

pub fn evaluate(input: &ProcaInputs, formula: FormulaId) -> Result<MassResult> {
    match formula {
        FormulaId::Eq1 => mu_eq1(input),
        FormulaId::Eq2 => mu_sq_eq2(input),
        FormulaId::Eq11 => mu_eq11(input),
        FormulaId::Eq12 => mu_eq12(input),
    }
}

/// Effective tower level `Σ = m*/μ − ½`, the unique solution of
/// `μ = m*/(Σ + ½)`.
pub fn sigma_extract(mu: f64, m_star: f64) -> Result<f64> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be > 0, got {mu}")));
    }
    if !(m_star.is_finite() && m_star > 0.0) {
        return Err(Error::InvalidArgument(format!("m* must be > 0, got {m_star}")));
    }
    Ok(m_star / mu - 0.5)
}

/// [`sigma_extract`] with `m* = ω_p0`, the photon mass in the unperturbed
/// plasma.
pub fn sigma_extract_default(mu: f64, profile: &PlasmaProfile) -> Result<f64> {
    sigma_extract(mu, profile.omega_p0())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityCheck {
    pub holds: bool,
    /// `E ω_p0² (1+η) + 4π box`.
    pub lhs: f64,
    /// `4π δv̇ (n0 + ñ cos(...))`.
    pub rhs: f64,
}

pub fn positivity_check(input: &ProcaInputs) -> PositivityCheck {
    let lhs = input.e_amp * input.profile.omega_p0_sq() * (1.0 + input.eta()) + FOUR_PI * input.box_grad_phi_par;
    let rhs = FOUR_PI * input.delta_v_dot * input.density();
    PositivityCheck {
        holds: lhs > rhs,
        lhs,
        rhs,
    }
}

/// `|μ₁² − μ₂²| / |μ₂²|`. Algebraically this is `|g / (E + g)|`.
pub fn eq1_eq2_discrepancy(input: &ProcaInputs) -> Result<f64> {
    let eq1 = mu_eq1(input)?;
    let eq2 = mu_sq_eq2(input)?;
    if eq2.mu_sq == 0.0 {
        return Err(Error::SingularDenominator("squared mass is zero".into()));
    }
    Ok((eq1.mu_sq - eq2.mu_sq).abs() / eq2.mu_sq.abs())
}
