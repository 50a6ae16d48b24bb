//! Fixed-step RK4 for the coupled amplitude equations
//!
//! ```text
//! i ȧ₁ = V₂₁(t) a₂
//! i ȧ₂ = ω₂₁ a₂ + V₂₁(t) a₁
//! ```
//!
//! in the lab frame, integrated as four real components. The state is never
//! renormalized; norm drift is left visible as a diagnostic.

use serde::{Deserialize, Serialize};

use crate::analytic::{leakage_at_peak, transfer_populations, LeakageReport};
use crate::error::{invalid, Error, Result};
use crate::model::{AmplitudeState, Populations, PulseSpec, Trajectory, TwoLevelAtom};

/// Default resolution: steps per field period, or per Gaussian width.
pub const DEFAULT_STEPS_PER_SCALE: u32 = 1000;
const MIN_STEPS_PER_SCALE: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    /// Explicit step in a.u.; shrunk slightly if needed so the grid ends on `t_end`.
    Step(f64),
    /// Steps per `PulseSpec::grid_scale` (the field period, or the Gaussian width).
    StepsPerPeriod(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub grid: Grid,
    pub t_start: f64,
    pub t_end: f64,
    pub initial: AmplitudeState,
}

impl IntegrationConfig {
    /// Starts in level 1 on the default grid.
    pub fn new(t_start: f64, t_end: f64) -> Self {
        Self {
            grid: Grid::StepsPerPeriod(DEFAULT_STEPS_PER_SCALE),
            t_start,
            t_end,
            initial: AmplitudeState::ground(),
        }
    }

    /// `n_periods` field periods of `pulse` from t = 0.
    pub fn periods(pulse: &PulseSpec, n_periods: f64, steps_per_period: u32) -> Self {
        Self {
            grid: Grid::StepsPerPeriod(steps_per_period),
            t_start: 0.0,
            t_end: n_periods * pulse.grid_scale(),
            initial: AmplitudeState::ground(),
        }
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_initial(mut self, initial: AmplitudeState) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(invalid(
                "t_end",
                format!("need finite t_end > t_start, got [{}, {}]", self.t_start, self.t_end),
            ));
        }
        match self.grid {
            Grid::Step(h) if !(h.is_finite() && h > 0.0) => {
                return Err(invalid("step", format!("must be > 0, got {h}")));
            }
            Grid::StepsPerPeriod(n) if n < MIN_STEPS_PER_SCALE => {
                return Err(invalid(
                    "steps_per_period",
                    format!("must be >= {MIN_STEPS_PER_SCALE}, got {n}"),
                ));
            }
            _ => {}
        }
        if !self.initial.is_finite() {
            return Err(invalid("initial", "initial amplitudes must be finite"));
        }
        Ok(())
    }

    /// Number of RK4 steps the grid resolves to for `pulse`.
    pub fn step_count(&self, pulse: &PulseSpec) -> usize {
        let span = self.t_end - self.t_start;
        let nominal = match self.grid {
            Grid::Step(h) => h,
            Grid::StepsPerPeriod(n) => pulse.grid_scale() / n as f64,
        };
        ((span / nominal) - 1e-9).ceil().max(1.0) as usize
    }
}

fn rhs(omega21: f64, v: f64, y: &[f64; 4]) -> [f64; 4] {
    let [x1, y1, x2, y2] = *y;
    // b = ω₂₁ a₂ + V a₁; ȧ₁ = −i V a₂; ȧ₂ = −i b
    let bx = omega21 * x2 + v * x1;
    let by = omega21 * y2 + v * y1;
    [v * y2, -v * x2, by, -bx]
}

fn axpy(y: &[f64; 4], h: f64, k: &[f64; 4]) -> [f64; 4] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

fn rk4_step(omega21: f64, pulse: &PulseSpec, t: f64, h: f64, y: &[f64; 4]) -> [f64; 4] {
    let v_start = pulse.value(t);
    let v_mid = pulse.value(t + 0.5 * h);
    let v_end = pulse.value(t + h);
    let k1 = rhs(omega21, v_start, y);
    let k2 = rhs(omega21, v_mid, &axpy(y, 0.5 * h, &k1));
    let k3 = rhs(omega21, v_mid, &axpy(y, 0.5 * h, &k2));
    let k4 = rhs(omega21, v_end, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates from `config.initial` over `[t_start, t_end]`.
pub fn integrate(atom: &TwoLevelAtom, pulse: &PulseSpec, config: &IntegrationConfig) -> Result<Trajectory> {
    atom.validate()?;
    pulse.validate()?;
    config.validate()?;
    let n = config.step_count(pulse);
    let h = (config.t_end - config.t_start) / n as f64;

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(config.t_start);
    states.push(config.initial);

    let mut y = config.initial.to_real();
    for i in 0..n {
        let t = config.t_start + i as f64 * h;
        y = rk4_step(atom.omega21, pulse, t, h, &y);
        let t_next = if i + 1 == n {
            config.t_end
        } else {
            config.t_start + (i + 1) as f64 * h
        };
        if y.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { time: t_next });
        }
        times.push(t_next);
        states.push(AmplitudeState::from_real(y));
    }
    Trajectory::new(times, states)
}

/// Result of re-running on a grid with half the step.
#[derive(Debug, Clone)]
pub struct StepHalvingEstimate {
    pub trajectory: Trajectory,
    /// Max `|P₂(h) − P₂(h/2)|` over the coarse grid.
    pub max_p2_change: f64,
}

/// Integrates on the configured grid and on one twice as fine, reporting
/// the difference. The coarse trajectory is returned unmodified.
pub fn integrate_with_error_estimate(
    atom: &TwoLevelAtom,
    pulse: &PulseSpec,
    config: &IntegrationConfig,
) -> Result<StepHalvingEstimate> {
    let coarse = integrate(atom, pulse, config)?;
    let n = config.step_count(pulse);
    let fine_cfg = config.with_grid(Grid::Step((config.t_end - config.t_start) / (2 * n) as f64));
    let fine = integrate(atom, pulse, &fine_cfg)?;
    let max_p2_change = coarse
        .states()
        .iter()
        .zip(fine.states().iter().step_by(2))
        .map(|(a, b)| (a.a2.norm_sqr() - b.a2.norm_sqr()).abs())
        .fold(0.0, f64::max);
    Ok(StepHalvingEstimate {
        trajectory: coarse,
        max_p2_change,
    })
}

/// Max `|P₂ − P₂_ref|` over grid points inside `[window.0, window.1]`.
pub fn max_population_deviation(
    traj: &Trajectory,
    reference: impl Fn(f64) -> Populations,
    window: (f64, f64),
) -> Result<f64> {
    let (start, end) = window;
    let mut found = false;
    let mut worst: f64 = 0.0;
    for (t, s) in traj.iter() {
        if t >= start && t <= end {
            found = true;
            worst = worst.max((s.a2.norm_sqr() - reference(t).p2).abs());
        }
    }
    if !found || start > end {
        return Err(Error::EmptyWindow { start, end });
    }
    Ok(worst)
}

/// Full width of the longest contiguous stretch where `1 − P₂ ≤ p_cr`,
/// with the ends placed by linear interpolation between grid points.
pub fn populated_window(traj: &Trajectory, p_cr: f64) -> Result<f64> {
    if !(p_cr > 0.0) {
        return Err(invalid("p_cr", format!("must be > 0, got {p_cr}")));
    }
    let threshold = 1.0 - p_cr;
    let times = traj.times();
    let p2 = traj.p2();
    let inside = |i: usize| p2[i] >= threshold;

    // interpolated crossing between an outside point and an inside point
    let crossing = |out: usize, inn: usize| {
        let (t0, t1) = (times[out], times[inn]);
        let (p0, p1) = (p2[out], p2[inn]);
        t0 + (threshold - p0) / (p1 - p0) * (t1 - t0)
    };

    let mut best: Option<f64> = None;
    let mut i = 0;
    while i < p2.len() {
        if !inside(i) {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < p2.len() && inside(i + 1) {
            i += 1;
        }
        let last = i;
        let left = if first == 0 {
            times[0]
        } else {
            crossing(first - 1, first)
        };
        let right = if last + 1 == p2.len() {
            times[last]
        } else {
            crossing(last + 1, last)
        };
        let width = right - left;
        if best.is_none_or(|b| width > b) {
            best = Some(width);
        }
        i += 1;
    }
    best.ok_or_else(|| Error::ThresholdNotReached {
        max_p2: p2.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        threshold,
    })
}

/// Runs the complete-transfer cosine at `omega` through its first peak and
/// compares `P₂` there with the degenerate-limit value.
pub fn peak_leakage_report(omega21: f64, omega: f64, steps_per_period: u32) -> Result<LeakageReport> {
    let atom = TwoLevelAtom::with_splitting(omega21)?;
    let pulse = PulseSpec::transfer_cosine(omega)?;
    // half a period, grid divisible by four so t₀ = T/4 is a grid point
    let steps = steps_per_period.div_ceil(4) * 4;
    let cfg = IntegrationConfig::periods(&pulse, 0.5, steps);
    let traj = integrate(&atom, &pulse, &cfg)?;
    let peak_time = std::f64::consts::PI / (2.0 * omega);
    let idx = traj.nearest_index(peak_time);
    let measured = (traj.states()[idx].a2.norm_sqr() - transfer_populations(omega, traj.times()[idx])?.p2).abs();
    Ok(LeakageReport {
        omega,
        omega21,
        predicted_leakage: leakage_at_peak(omega21, omega)?,
        measured_leakage: measured.clamp(0.0, 1.0),
        peak_time,
    })
}
