//! Atomic-unit constants and the conversions used at the I/O boundary.

use std::f64::consts::PI;

/// eV per Hartree.
pub const HARTREE_EV: f64 = 27.211386;
/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT_AU: f64 = 137.035999;
/// Bohr radius in metres.
pub const BOHR_M: f64 = 5.29177e-11;
/// Intensity, in W/cm², of a field with peak amplitude 1 a.u. (peak-field
/// convention, `I = E₀²·I_au`; the cycle average is half of this).
pub const INTENSITY_AU_W_CM2: f64 = 3.50945e16;

pub fn ev_to_hartree(ev: f64) -> f64 {
    ev / HARTREE_EV
}

pub fn hartree_to_ev(hartree: f64) -> f64 {
    hartree * HARTREE_EV
}

/// Angular frequency (a.u.) of light with vacuum wavelength `meters`.
pub fn wavelength_to_omega(meters: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_AU / (meters / BOHR_M)
}

pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_AU / omega * BOHR_M
}

pub fn field_to_intensity(e0: f64) -> f64 {
    e0 * e0 * INTENSITY_AU_W_CM2
}

pub fn intensity_to_field(w_per_cm2: f64) -> f64 {
    (w_per_cm2 / INTENSITY_AU_W_CM2).sqrt()
}
