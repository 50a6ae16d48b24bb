//! Closed-form results for the degenerate limit `ω₂₁ → 0`.
//!
//! With the splitting dropped, the coupled amplitude equations integrate
//! exactly: for any drive, `a₁ = cos A(t)` and `a₂ = −i sin A(t)` where
//! `A(t) = ∫₀ᵗ V₂₁`. For the cosine drive this is
//! `a₁ = cos[(χ/ω) sin ωt]`, `a₂ = i sin[(χ/ω) sin ωt]`.
//!
//! Everything else here follows from that: the complete-transfer ratio
//! `χ/ω = π/2`, the quartic flat top near the first peak, the frequency
//! that buys a given flat-top duration, the finite-splitting leakage
//! estimates, and arbitrary-order time derivatives of `P₂` via Faà di Bruno.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{AmplitudeState, Populations, PulseSpec};

/// Highest derivative order `nth_derivative_p2` accepts.
pub const MAX_DERIVATIVE_ORDER: usize = 10;

/// Requested flat-top duration and the leakage it may tolerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignRequest {
    /// Full width `T_s` of the window around the peak.
    pub duration: f64,
    /// Leakage budget `P_cr`: `1 − P₂` must stay at or below it inside the window.
    pub leakage_budget: f64,
}

impl DesignRequest {
    pub fn new(duration: f64, leakage_budget: f64) -> Result<Self> {
        let req = Self {
            duration,
            leakage_budget,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(invalid("duration", format!("T_s must be > 0, got {}", self.duration)));
        }
        if !(self.leakage_budget > 0.0 && self.leakage_budget < 1.0) {
            return Err(invalid(
                "leakage_budget",
                format!("P_cr must lie in (0, 1), got {}", self.leakage_budget),
            ));
        }
        Ok(())
    }
}

/// Predicted vs measured population shortfall at the first peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub omega: f64,
    pub omega21: f64,
    /// Series bound `¼(π/2)⁶(ω₂₁/ω)²`.
    pub predicted_leakage: f64,
    /// `|P₂(numeric) − P₂(analytic)|` at the peak.
    pub measured_leakage: f64,
    pub peak_time: f64,
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(invalid("omega", format!("must be finite and > 0, got {omega}")))
    }
}

/// Amplitudes reached from the ground state after accumulating action `a`.
pub fn amplitudes_from_action(a: f64) -> AmplitudeState {
    AmplitudeState::new(Complex64::new(a.cos(), 0.0), Complex64::new(0.0, -a.sin()))
}

/// Degenerate-limit amplitudes for the cosine drive of Rabi frequency `chi`.
pub fn degenerate_amplitudes(chi: f64, omega: f64, t: f64) -> Result<AmplitudeState> {
    check_omega(omega)?;
    let arg = chi / omega * (omega * t).sin();
    Ok(AmplitudeState::new(
        Complex64::new(arg.cos(), 0.0),
        Complex64::new(0.0, arg.sin()),
    ))
}

/// Populations for the complete-transfer drive `χ/ω = π/2`.
/// `P₂` has period `π/ω`, half the field period.
pub fn transfer_populations(omega: f64, t: f64) -> Result<Populations> {
    check_omega(omega)?;
    let arg = PI / 2.0 * (omega * t).sin();
    Ok(Populations {
        p1: arg.cos().powi(2),
        p2: arg.sin().powi(2),
    })
}

/// Time of the `k`-th maximum of `P₂` for the complete-transfer drive.
pub fn peak_time(omega: f64, k: u32) -> f64 {
    PI / (2.0 * omega) + k as f64 * PI / omega
}

/// Quartic approximation `1 − (π²/16)(ωτ)⁴` to `P₂(t₀ + τ)`.
/// Intended for `|ωτ| < 1`; the value is returned unclamped.
pub fn quartic_peak_approx(omega: f64, tau: f64) -> f64 {
    1.0 - PI * PI / 16.0 * (omega * tau).powi(4)
}

/// Field frequency whose quartic flat top stays within `P_cr` of full
/// transfer over a window of full width `T_s`:
/// `ω·T_s/2 = (16 P_cr / π²)^¼`, i.e. `ω = (4/√π)·P_cr^¼ / T_s`.
pub fn design_frequency(req: &DesignRequest) -> Result<f64> {
    req.validate()?;
    let half_width_phase = (16.0 * req.leakage_budget / (PI * PI)).powf(0.25);
    Ok(2.0 * half_width_phase / req.duration)
}

/// Early-time leakage `¼ ω₂₁² χ² t⁴` caused by a finite splitting.
pub fn leakage_estimate(omega21: f64, chi: f64, t: f64) -> f64 {
    0.25 * omega21 * omega21 * chi * chi * t.powi(4)
}

/// Leakage at the first peak `t₀ = π/(2ω)` for `χ = (π/2)ω`:
/// `¼(π/2)⁶(ω₂₁/ω)²`. This is the leading series term, an order-of-magnitude
/// bound rather than a sharp prediction.
pub fn leakage_at_peak(omega21: f64, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let r = omega21 / omega;
    Ok(0.25 * (PI / 2.0).powi(6) * r * r)
}

/// `P₁ = cos² A(t)`, `P₂ = sin² A(t)` for an arbitrary drive.
pub fn populations_from_action(pulse: &PulseSpec, t: f64) -> Populations {
    let a = pulse.action(t);
    Populations {
        p1: a.cos().powi(2),
        p2: a.sin().powi(2),
    }
}

/// Integer partitions of `n`, each given as `(part, multiplicity)` pairs.
pub fn partitions(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn recurse(rest: usize, max_part: usize, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            for mult in (1..=rest / part).rev() {
                acc.push((part, mult));
                recurse(rest - part * mult, part - 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        recurse(n, n, &mut Vec::new(), &mut out);
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `dᵐ/dyᵐ sin²y`.
fn sin_sq_derivative(y: f64, m: usize) -> f64 {
    if m == 0 {
        return y.sin().powi(2);
    }
    // sin²y = (1 − cos 2y)/2
    let theta = 2.0 * y;
    let shifted = match m % 4 {
        0 => theta.cos(),
        1 => -theta.sin(),
        2 => -theta.cos(),
        _ => theta.sin(),
    };
    -(2f64).powi(m as i32 - 1) * shifted
}

/// `dⁿP₂/dtⁿ` for `P₂ = sin² A(t)`, summed over every partition of `n`
/// (Faà di Bruno). The inner derivatives are `A⁽ʲ⁾ = V₂₁⁽ʲ⁻¹⁾`.
pub fn nth_derivative_p2(pulse: &PulseSpec, t: f64, n: usize) -> Result<f64> {
    if n == 0 || n > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrder(n));
    }
    let y = pulse.action(t);
    // inner[j] = j-th derivative of the action, j = 1..=n
    let inner: Vec<f64> = (0..=n)
        .map(|j| if j == 0 { y } else { pulse.derivative(t, j as u32 - 1) })
        .collect();
    let n_fact = factorial(n);
    let total = partitions(n)
        .into_iter()
        .map(|parts| {
            let m: usize = parts.iter().map(|&(_, b)| b).sum();
            let mut term = n_fact * sin_sq_derivative(y, m);
            for &(j, b) in &parts {
                term *= (inner[j] / factorial(j)).powi(b as i32) / factorial(b);
            }
            term
        })
        .sum();
    Ok(total)
}

/// Populations for an ideal `(π/2)·δ(t − t₀)` kick: instantaneous inversion.
/// The step is taken as `Θ(0) = 1`.
pub fn delta_pulse_populations(t: f64, t0: f64) -> Populations {
    if t >= t0 {
        Populations { p1: 0.0, p2: 1.0 }
    } else {
        Populations { p1: 1.0, p2: 0.0 }
    }
}

/// Peak `P₂` when the drive ratio is `χ/ω = π/2 + ε`: exactly `cos²ε`,
/// which is `1 − ε²` to second order.
pub fn detuning_sensitivity(epsilon: f64) -> Result<f64> {
    if !(epsilon.abs() < PI / 2.0) {
        return Err(invalid("epsilon", format!("|ε| must be < π/2, got {epsilon}")));
    }
    Ok(epsilon.cos().powi(2))
}

/// Second-order form `1 − ε²` of [`detuning_sensitivity`].
pub fn detuning_sensitivity_quadratic(epsilon: f64) -> f64 {
    1.0 - epsilon * epsilon
}
