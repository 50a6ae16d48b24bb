//! Hydrogen 2s–2p parameters and field-regime checks.
//!
//! Orbitals are the closed-form Z = 1, infinite-nuclear-mass functions.
//! The transition dipole is obtained by quadrature rather than hard-coded:
//! Gauss–Laguerre in `r` (the radial product carries an `e^{-r}` factor)
//! times Gauss–Legendre in `cos θ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::leakage_at_peak;
use crate::error::{invalid, Result};
use crate::model::TwoLevelAtom;
use crate::quadrature::{gauss_laguerre, gauss_legendre};
use crate::units::{ev_to_hartree, field_to_intensity, omega_to_wavelength};

/// 2s–2p splitting in eV.
pub const LAMB_SHIFT_EV: f64 = 4.37e-6;
/// Distance from n = 2 to the 3p level in eV.
pub const GAP_2S_3P_EV: f64 = 1.89;

/// Radial nodes used by [`dipole_2s2p`].
pub const DEFAULT_RADIAL_NODES: usize = 64;
const ANGULAR_NODES: usize = 8;

pub fn lamb_shift() -> f64 {
    ev_to_hartree(LAMB_SHIFT_EV)
}

pub fn next_level_gap() -> f64 {
    ev_to_hartree(GAP_2S_3P_EV)
}

/// n = 2 hydrogen orbitals with m = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orbital {
    S2,
    P2z,
}

impl Orbital {
    /// `R(r)·e^{r/2}`: the radial function with its exponential stripped.
    fn radial_poly(self, r: f64) -> f64 {
        match self {
            Orbital::S2 => (2.0 - r) / (2.0 * 2f64.sqrt()),
            Orbital::P2z => r / (2.0 * 6f64.sqrt()),
        }
    }

    /// `Y(cos θ)` (axially symmetric).
    fn angular(self, x: f64) -> f64 {
        match self {
            Orbital::S2 => (1.0 / (4.0 * PI)).sqrt(),
            Orbital::P2z => (3.0 / (4.0 * PI)).sqrt() * x,
        }
    }
}

/// `⟨a|z|b⟩` with `radial_nodes` Gauss–Laguerre points.
pub fn z_matrix_element(a: Orbital, b: Orbital, radial_nodes: usize) -> f64 {
    // ∫ Ra Rb r³ dr with Ra Rb = poly · e^{-r}
    let radial = gauss_laguerre(radial_nodes).integrate(|r| a.radial_poly(r) * b.radial_poly(r) * r.powi(3));
    // 2π ∫ Ya x Yb dx
    let angular = 2.0 * PI * gauss_legendre(ANGULAR_NODES).integrate(|x| a.angular(x) * x * b.angular(x));
    radial * angular
}

/// Signed `⟨2s|z|2p₀⟩`; magnitude 3 a.u.
pub fn dipole_2s2p() -> f64 {
    z_matrix_element(Orbital::S2, Orbital::P2z, DEFAULT_RADIAL_NODES)
}

/// Hydrogen 2s–2p as a two-level atom with the field along z.
pub fn hydrogen_atom() -> TwoLevelAtom {
    TwoLevelAtom {
        omega21: lamb_shift(),
        dipole_projection: dipole_2s2p(),
    }
}

/// Field that drives complete transfer at frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRegime {
    pub omega: f64,
    /// Vacuum wavelength in metres.
    pub wavelength: f64,
    /// Peak field amplitude in a.u.
    pub e0: f64,
    /// Peak-field intensity in W/cm².
    pub intensity: f64,
}

/// `E₀ = (π/2)ω/|d|` so that `χ/ω = π/2`.
pub fn field_for_transfer(omega: f64) -> Result<FieldRegime> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(invalid("omega", format!("must be > 0, got {omega}")));
    }
    let e0 = PI / 2.0 * omega / dipole_2s2p().abs();
    Ok(FieldRegime {
        omega,
        wavelength: omega_to_wavelength(omega),
        e0,
        intensity: field_to_intensity(e0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Marginal,
    Invalid,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "valid",
            Verdict::Marginal => "marginal",
            Verdict::Invalid => "invalid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub omega: f64,
    /// `ω₂₁/ω`; must be small for the degenerate solution.
    pub splitting_ratio: f64,
    /// `ω/ω₂ₛ₃ₚ`; must be small for the two-level truncation.
    pub gap_ratio: f64,
    pub leakage_bound: f64,
    pub verdict: Verdict,
}

/// Checks `ω₂₁ ≪ ω ≪ ω₂ₛ₃ₚ` for hydrogen.
///
/// Valid needs a decade of margin on both sides; within the last decade
/// before either edge the verdict is marginal.
pub fn validity_report(omega: f64) -> Result<ValidityReport> {
    let omega21 = lamb_shift();
    let gap = next_level_gap();
    let leakage_bound = leakage_at_peak(omega21, omega)?;
    let verdict = if omega >= 10.0 * omega21 && omega <= gap / 10.0 {
        Verdict::Valid
    } else if omega > omega21 && omega < gap {
        Verdict::Marginal
    } else {
        Verdict::Invalid
    };
    Ok(ValidityReport {
        omega,
        splitting_ratio: omega21 / omega,
        gap_ratio: omega / gap,
        leakage_bound,
        verdict,
    })
}
