//! Domain types shared by every other module.
//!
//! Everything is in atomic units (ħ = e = mₑ = 1). Energies and frequencies
//! are in Hartree, times in ħ/Eₕ, lengths in Bohr radii.
//!
//! The coupling convention follows the dipole form `V₂₁(t) = −χ cos(ωt)`
//! for the cosine family. Occupation probabilities depend only on `|A(t)|`
//! where `A` is the action integral of `V₂₁`, so they are invariant under a
//! global sign flip of the pulse.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Two-level atom with the lower level as the zero of energy, so `E₁ = 0`
/// and `E₂ = ω₂₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelAtom {
    pub omega21: f64,
    /// Signed projection `r₂₁·ê` of the transition dipole on the field axis.
    pub dipole_projection: f64,
}

impl TwoLevelAtom {
    pub fn new(omega21: f64, dipole_projection: f64) -> Result<Self> {
        let atom = Self {
            omega21,
            dipole_projection,
        };
        atom.validate()?;
        Ok(atom)
    }

    /// Atom with unit dipole, handy when the pulse is given directly in
    /// Rabi-frequency units.
    pub fn with_splitting(omega21: f64) -> Result<Self> {
        Self::new(omega21, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega21.is_finite() && self.omega21 >= 0.0) {
            return Err(invalid("omega21", format!("must be finite and >= 0, got {}", self.omega21)));
        }
        if !self.dipole_projection.is_finite() {
            return Err(invalid("dipole_projection", "must be finite"));
        }
        Ok(())
    }

    pub fn energies(&self) -> (f64, f64) {
        (0.0, self.omega21)
    }

    /// Rabi frequency `χ = (r₂₁·ê) E₀` for a field of peak amplitude `e0`.
    pub fn rabi_frequency(&self, e0: f64) -> Result<f64> {
        if self.dipole_projection == 0.0 {
            return Err(invalid("dipole_projection", "must be nonzero to couple to a field"));
        }
        Ok(self.dipole_projection * e0)
    }

    /// Field amplitude producing the Rabi frequency `chi`.
    pub fn field_amplitude(&self, chi: f64) -> Result<f64> {
        if self.dipole_projection == 0.0 {
            return Err(invalid("dipole_projection", "must be nonzero to derive a field amplitude"));
        }
        Ok(chi / self.dipole_projection)
    }
}

/// One term `χ_k cos(kωt)` of a harmonic sum. Only odd `k` is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub harmonic: u32,
    pub amplitude: f64,
}

/// Shape of the coupling matrix element `V₂₁(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PulseSpec {
    /// `V₂₁(t) = −χ cos(ωt)`.
    Cosine { chi: f64, omega: f64 },
    /// `V₂₁(t) = −Σ χ_k cos(kωt)` over odd harmonics `k`.
    HarmonicSum {
        omega: f64,
        coefficients: Vec<Harmonic>,
    },
    /// Normalized Gaussian of standard deviation `width` centred on
    /// `center`, carrying total action `area`. Approximates `area·δ(t − center)`.
    #[serde(rename = "gaussian")]
    GaussianApprox { area: f64, center: f64, width: f64 },
}

impl PulseSpec {
    pub fn cosine(chi: f64, omega: f64) -> Result<Self> {
        let p = PulseSpec::Cosine { chi, omega };
        p.validate()?;
        Ok(p)
    }

    /// Builds an odd-harmonic sum from `(k, χ_k)` pairs.
    pub fn harmonic_sum(omega: f64, coefficients: &[(u32, f64)]) -> Result<Self> {
        let p = PulseSpec::HarmonicSum {
            omega,
            coefficients: coefficients
                .iter()
                .map(|&(harmonic, amplitude)| Harmonic { harmonic, amplitude })
                .collect(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn gaussian(area: f64, center: f64, width: f64) -> Result<Self> {
        let p = PulseSpec::GaussianApprox { area, center, width };
        p.validate()?;
        Ok(p)
    }

    /// Cosine drive at the complete-transfer ratio `χ/ω = π/2`.
    pub fn transfer_cosine(omega: f64) -> Result<Self> {
        Self::cosine(PI / 2.0 * omega, omega)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PulseSpec::Cosine { chi, omega } => {
                check_omega(*omega)?;
                if !chi.is_finite() {
                    return Err(invalid("chi", "must be finite"));
                }
            }
            PulseSpec::HarmonicSum {
                omega,
                coefficients,
            } => {
                check_omega(*omega)?;
                if coefficients.is_empty() {
                    return Err(invalid("coefficients", "harmonic sum needs at least one term"));
                }
                for c in coefficients {
                    if c.harmonic % 2 == 0 {
                        return Err(invalid(
                            "coefficients",
                            format!("harmonic index {} is not odd", c.harmonic),
                        ));
                    }
                    if !c.amplitude.is_finite() {
                        return Err(invalid("coefficients", "amplitudes must be finite"));
                    }
                }
            }
            PulseSpec::GaussianApprox {
                area,
                center,
                width,
            } => {
                if !(area.is_finite() && center.is_finite()) {
                    return Err(invalid("area", "area and center must be finite"));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(invalid("width", format!("must be > 0, got {width}")));
                }
            }
        }
        Ok(())
    }

    /// Base field frequency, if the pulse is periodic.
    pub fn omega(&self) -> Option<f64> {
        match self {
            PulseSpec::Cosine { omega, .. } | PulseSpec::HarmonicSum { omega, .. } => Some(*omega),
            PulseSpec::GaussianApprox { .. } => None,
        }
    }

    /// Time scale the default integration grid is built on: the field period
    /// `2π/ω` for periodic drives, the width for the Gaussian.
    pub fn grid_scale(&self) -> f64 {
        match self {
            PulseSpec::Cosine { omega, .. } | PulseSpec::HarmonicSum { omega, .. } => 2.0 * PI / omega,
            PulseSpec::GaussianApprox { width, .. } => *width,
        }
    }

    /// Returns the same shape with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> PulseSpec {
        match self {
            PulseSpec::Cosine { chi, omega } => PulseSpec::Cosine {
                chi: chi * factor,
                omega: *omega,
            },
            PulseSpec::HarmonicSum {
                omega,
                coefficients,
            } => PulseSpec::HarmonicSum {
                omega: *omega,
                coefficients: coefficients
                    .iter()
                    .map(|c| Harmonic {
                        harmonic: c.harmonic,
                        amplitude: c.amplitude * factor,
                    })
                    .collect(),
            },
            PulseSpec::GaussianApprox {
                area,
                center,
                width,
            } => PulseSpec::GaussianApprox {
                area: area * factor,
                center: *center,
                width: *width,
            },
        }
    }

    /// `V₂₁(t)`.
    pub fn value(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// `dᵏV₂₁/dtᵏ` at `t`, in closed form for every arm.
    pub fn derivative(&self, t: f64, k: u32) -> f64 {
        match self {
            PulseSpec::Cosine { chi, omega } => -chi * omega.powi(k as i32) * shifted_cos(omega * t, k),
            PulseSpec::HarmonicSum {
                omega,
                coefficients,
            } => coefficients
                .iter()
                .map(|c| {
                    let kw = c.harmonic as f64 * omega;
                    -c.amplitude * kw.powi(k as i32) * shifted_cos(kw * t, k)
                })
                .sum(),
            PulseSpec::GaussianApprox {
                area,
                center,
                width,
            } => {
                let x = (t - center) / width;
                let envelope = area / (width * (2.0 * PI).sqrt()) * (-0.5 * x * x).exp();
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                envelope * sign * hermite_he(k, x) / width.powi(k as i32)
            }
        }
    }

    /// Signed action `A(t) = ∫₀ᵗ V₂₁(τ) dτ`.
    pub fn action(&self, t: f64) -> f64 {
        match self {
            PulseSpec::Cosine { chi, omega } => -(chi / omega) * (omega * t).sin(),
            PulseSpec::HarmonicSum {
                omega,
                coefficients,
            } => coefficients
                .iter()
                .map(|c| {
                    let kw = c.harmonic as f64 * omega;
                    -c.amplitude * (kw * t).sin() / kw
                })
                .sum(),
            PulseSpec::GaussianApprox {
                area,
                center,
                width,
            } => {
                let s = SQRT_2 * width;
                0.5 * area * (libm::erf((t - center) / s) - libm::erf(-center / s))
            }
        }
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(invalid("omega", format!("must be finite and > 0, got {omega}")))
    }
}

/// `cos(θ + kπ/2)` without adding `kπ/2` to the argument, so zeros of the
/// underlying sine/cosine stay exact.
fn shifted_cos(theta: f64, k: u32) -> f64 {
    match k % 4 {
        0 => theta.cos(),
        1 => -theta.sin(),
        2 => -theta.cos(),
        _ => theta.sin(),
    }
}

/// Probabilists' Hermite polynomial `Heₙ(x)`.
fn hermite_he(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `V₂₁(t)` for the given pulse.
pub fn pulse_value(pulse: &PulseSpec, t: f64) -> f64 {
    pulse.value(t)
}

/// Signed action integral of the pulse from 0 to `t`.
pub fn action(pulse: &PulseSpec, t: f64) -> f64 {
    pulse.action(t)
}

/// Occupation probabilities `(P₁, P₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub p1: f64,
    pub p2: f64,
}

impl Populations {
    pub fn total(&self) -> f64 {
        self.p1 + self.p2
    }
}

/// Probability amplitudes of the two levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeState {
    pub a1: Complex64,
    pub a2: Complex64,
}

impl AmplitudeState {
    pub const fn new(a1: Complex64, a2: Complex64) -> Self {
        Self { a1, a2 }
    }

    /// All population in level 1.
    pub const fn ground() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a1.norm_sqr() + self.a2.norm_sqr()
    }

    pub fn norm_error(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    pub fn is_finite(&self) -> bool {
        self.a1.is_finite() && self.a2.is_finite()
    }

    pub fn probabilities(&self) -> Populations {
        Populations {
            p1: self.a1.norm_sqr(),
            p2: self.a2.norm_sqr(),
        }
    }

    pub(crate) fn to_real(self) -> [f64; 4] {
        [self.a1.re, self.a1.im, self.a2.re, self.a2.im]
    }

    pub(crate) fn from_real(y: [f64; 4]) -> Self {
        Self::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
    }
}

pub fn probabilities(state: &AmplitudeState) -> Populations {
    state.probabilities()
}

/// Amplitudes sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<AmplitudeState>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<AmplitudeState>) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(invalid(
                "trajectory",
                format!("{} times vs {} states", times.len(), states.len()),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("trajectory", "times must be strictly increasing"));
        }
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[AmplitudeState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &AmplitudeState)> + '_ {
        self.times.iter().copied().zip(self.states.iter())
    }

    pub fn p2(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.a2.norm_sqr()).collect()
    }

    pub fn final_state(&self) -> &AmplitudeState {
        &self.states[self.states.len() - 1]
    }

    pub fn max_norm_error(&self) -> f64 {
        self.states.iter().map(AmplitudeState::norm_error).fold(0.0, f64::max)
    }

    /// Index of the state closest in time to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i == self.times.len() => i - 1,
            Err(i) => {
                if t - self.times[i - 1] <= self.times[i] - t {
                    i - 1
                } else {
                    i
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn cosine_value_examples() {
        let p = PulseSpec::cosine(1.0, 1.0).unwrap();
        assert_eq!(pulse_value(&p, 0.0), -1.0);
        assert_abs_diff_eq!(pulse_value(&p, PI / 2.0), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn single_harmonic_reduces_to_cosine() {
        let h = PulseSpec::harmonic_sum(2.0, &[(1, 0.7)]).unwrap();
        let c = PulseSpec::cosine(0.7, 2.0).unwrap();
        assert_eq!(h.value(0.3), c.value(0.3));
        for i in 0..1000 {
            let t = -20.0 + 0.04 * i as f64;
            assert_eq!(h.value(t), c.value(t));
            assert_eq!(h.action(t), c.action(t));
            assert_eq!(h.derivative(t, 3), c.derivative(t, 3));
        }
    }

    #[test]
    fn action_examples() {
        let w = 1.7;
        let p = PulseSpec::cosine(0.4, w).unwrap();
        assert_abs_diff_eq!(action(&p, PI / w), 0.0, epsilon = 1e-15);
        let p = PulseSpec::transfer_cosine(w).unwrap();
        assert_abs_diff_eq!(action(&p, PI / (2.0 * w)).abs(), PI / 2.0, epsilon = 1e-15);
        let g = PulseSpec::gaussian(PI / 2.0, 5.0, 0.1).unwrap();
        assert_abs_diff_eq!(action(&g, 10.0), PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(action(&g, 0.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn probabilities_examples() {
        let i = Complex64::i();
        let p = probabilities(&AmplitudeState::ground());
        assert_eq!((p.p1, p.p2), (1.0, 0.0));
        let p = probabilities(&AmplitudeState::new(Complex64::new(0.0, 0.0), i));
        assert_eq!((p.p1, p.p2), (0.0, 1.0));
        let s = AmplitudeState::new(Complex64::new(FRAC_1_SQRT_2, 0.0), i * FRAC_1_SQRT_2);
        let p = s.probabilities();
        assert_abs_diff_eq!(p.p1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.p2, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_derivatives_match_hermite_forms() {
        let g = PulseSpec::gaussian(1.3, 0.5, 0.2).unwrap();
        let t = 0.63;
        let x = (t - 0.5) / 0.2;
        let v = g.value(t);
        assert_abs_diff_eq!(g.derivative(t, 1), -x / 0.2 * v, epsilon = 1e-12);
        assert_abs_diff_eq!(g.derivative(t, 2), (x * x - 1.0) / 0.04 * v, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_pulses() {
        assert!(PulseSpec::cosine(1.0, 0.0).is_err());
        assert!(PulseSpec::cosine(1.0, -1.0).is_err());
        assert!(PulseSpec::harmonic_sum(1.0, &[(2, 1.0)]).is_err());
        assert!(PulseSpec::harmonic_sum(1.0, &[]).is_err());
        assert!(PulseSpec::gaussian(1.0, 0.0, 0.0).is_err());
        assert!(TwoLevelAtom::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn pulse_json_tags() {
        let p: PulseSpec = serde_json::from_str(r#"{"type":"cosine","chi":1.5,"omega":2.0}"#).unwrap();
        assert_eq!(p, PulseSpec::Cosine { chi: 1.5, omega: 2.0 });
        let p: PulseSpec = serde_json::from_str(
            r#"{"type":"harmonic_sum","omega":1.0,"coefficients":[{"harmonic":1,"amplitude":0.5},{"harmonic":3,"amplitude":0.1}]}"#,
        )
        .unwrap();
        assert!(matches!(p, PulseSpec::HarmonicSum { .. }));
        let p: PulseSpec =
            serde_json::from_str(r#"{"type":"gaussian","area":1.0,"center":2.0,"width":0.1}"#).unwrap();
        assert!(matches!(p, PulseSpec::GaussianApprox { .. }));
        let s = serde_json::to_string(&AmplitudeState::ground()).unwrap();
        assert_eq!(s, r#"{"a1":[1.0,0.0],"a2":[0.0,0.0]}"#);
    }

    #[test]
    fn trajectory_rejects_bad_grids() {
        let s = AmplitudeState::ground();
        assert!(Trajectory::new(vec![0.0, 0.0], vec![s, s]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![s]).is_err());
        let tr = Trajectory::new(vec![0.0, 1.0, 2.0], vec![s; 3]).unwrap();
        assert_eq!(tr.nearest_index(1.4), 1);
        assert_eq!(tr.nearest_index(1.6), 2);
        assert_eq!(tr.nearest_index(-3.0), 0);
    }
}
