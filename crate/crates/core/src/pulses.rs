//! Pulse shaping for longer flat tops.
//!
//! The search family is odd-harmonic sums `V₂₁(t) = −Σ χ_k cos(kωt)` at a
//! fixed base frequency: every member keeps the first peak at
//! `t₀ = π/(2ω)`, and its odd-order action derivatives vanish there, so
//! the remaining freedom goes into cancelling the even ones. Each candidate
//! is rescaled to action `π/2` at `t₀` before it is scored.
//!
//! The optimizer is a small real-coded GA: tournament selection of size 2,
//! blend crossover, Gaussian mutation and one elite. All random draws are
//! made on the calling thread; only fitness evaluation runs in parallel.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{nth_derivative_p2, MAX_DERIVATIVE_ORDER};
use crate::error::{invalid, Error, Result};
use crate::integrator::{integrate, populated_window, IntegrationConfig};
use crate::model::{PulseSpec, TwoLevelAtom};

/// Derivatives below `FLATNESS_TOLERANCE · ωⁿ` count as zero.
pub const FLATNESS_TOLERANCE: f64 = 1e-9;

const IDEMPOTENT_SLACK: f64 = 4.0 * f64::EPSILON;

/// Rescales the pulse so that `|A(t_peak)| = π/2`.
pub fn normalize_for_transfer(pulse: &PulseSpec, t_peak: f64) -> Result<PulseSpec> {
    let a = pulse.action(t_peak);
    if !a.is_finite() || a.abs() <= 1e-12 * action_scale(pulse) {
        return Err(Error::ZeroAction { time: t_peak });
    }
    let factor = (PI / 2.0) / a.abs();
    if (factor - 1.0).abs() <= IDEMPOTENT_SLACK {
        return Ok(pulse.clone());
    }
    Ok(pulse.scaled(factor))
}

/// Largest action the pulse could accumulate; zero-action tests are relative to it.
fn action_scale(pulse: &PulseSpec) -> f64 {
    match pulse {
        PulseSpec::Cosine { chi, omega } => chi.abs() / omega,
        PulseSpec::HarmonicSum {
            omega,
            coefficients,
        } => coefficients
            .iter()
            .map(|c| c.amplitude.abs() / (c.harmonic as f64 * omega))
            .sum(),
        PulseSpec::GaussianApprox { area, .. } => area.abs(),
    }
}

/// Frequency scale used to make derivative tolerances dimensionless.
fn frequency_scale(pulse: &PulseSpec) -> f64 {
    match pulse {
        PulseSpec::GaussianApprox { width, .. } => 1.0 / width,
        _ => pulse.omega().unwrap_or(1.0),
    }
}

/// Order of the first derivative of `P₂` at `t_peak` that is not zero, or
/// `n_max + 1` when all orders up to `n_max` vanish.
pub fn flatness_order(pulse: &PulseSpec, t_peak: f64, n_max: usize) -> Result<usize> {
    if n_max == 0 || n_max > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrder(n_max));
    }
    let w = frequency_scale(pulse);
    for n in 1..=n_max {
        let d = nth_derivative_p2(pulse, t_peak, n)?;
        if d.abs() > FLATNESS_TOLERANCE * w.powi(n as i32) {
            return Ok(n);
        }
    }
    Ok(n_max + 1)
}

/// First/third-harmonic pulse with `d²A/dt²(t₀) = 0`, normalized for
/// complete transfer: `χ₁ = 9πω/16`, `χ₃ = χ₁/3`.
///
/// `A'' = V'` is `ω(χ₁ − 3χ₃)` at `t₀`, and the action there is
/// `−(χ₁/ω)(1 − 1/9)`, which fixes the overall scale.
pub fn nulled_two_harmonic(omega: f64) -> Result<PulseSpec> {
    let c1 = 9.0 * PI * omega / 16.0;
    PulseSpec::harmonic_sum(omega, &[(1, c1), (3, c1 / 3.0)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapingObjective {
    pub leakage_budget: f64,
    pub omega: f64,
    pub atom: TwoLevelAtom,
    /// Field periods simulated per fitness evaluation.
    pub horizon: u32,
}

impl ShapingObjective {
    pub fn validate(&self) -> Result<()> {
        if !(self.leakage_budget > 0.0 && self.leakage_budget < 1.0) {
            return Err(invalid("leakage_budget", "P_cr must lie in (0, 1)"));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(invalid("omega", "must be > 0"));
        }
        if self.horizon < 1 {
            return Err(invalid("horizon", "need at least one period"));
        }
        self.atom.validate()
    }

    pub fn peak_time(&self) -> f64 {
        PI / (2.0 * self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Standard deviation of the Gaussian mutation, in units of `ω`.
    pub mutation_scale: f64,
    pub seed: u64,
    /// Number of odd harmonics `1, 3, 5, …` in the search space.
    pub n_harmonics: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            population_size: 24,
            generations: 40,
            mutation_scale: 0.1,
            seed: 0,
            n_harmonics: 3,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(invalid("population_size", "must be >= 4"));
        }
        if self.generations < 1 {
            return Err(invalid("generations", "must be >= 1"));
        }
        if !(self.mutation_scale.is_finite() && self.mutation_scale > 0.0) {
            return Err(invalid("mutation_scale", "must be > 0"));
        }
        if !(1..=8).contains(&self.n_harmonics) {
            return Err(invalid("n_harmonics", "must lie in 1..=8"));
        }
        Ok(())
    }
}

/// Steps per base period: enough to resolve the highest harmonic.
fn steps_for(n_harmonics: usize) -> u32 {
    let k_max = 2 * n_harmonics as u32 - 1;
    (250 * k_max).max(1000)
}

/// Measured `T_s` of `pulse` under the objective, or `None` if `P₂` never
/// gets within `P_cr` of one.
pub fn measure_window(objective: &ShapingObjective, pulse: &PulseSpec, steps_per_period: u32) -> Result<Option<f64>> {
    let cfg = IntegrationConfig::periods(pulse, objective.horizon as f64, steps_per_period);
    let traj = integrate(&objective.atom, pulse, &cfg)?;
    match populated_window(&traj, objective.leakage_budget) {
        Ok(w) => Ok(Some(w)),
        Err(Error::ThresholdNotReached { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `T_s` achieved by the normalized cosine under the objective.
pub fn cosine_baseline(objective: &ShapingObjective) -> Result<f64> {
    objective.validate()?;
    let pulse = PulseSpec::transfer_cosine(objective.omega)?;
    measure_window(objective, &pulse, steps_for(1))?.ok_or(Error::NoViableCandidate)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub pulse: PulseSpec,
    pub achieved_duration: f64,
    pub baseline_duration: f64,
    /// Best fitness after each generation, starting with the initial population.
    pub history: Vec<f64>,
    pub seed: u64,
    pub config: OptimizerConfig,
    pub objective: ShapingObjective,
}

#[derive(Debug, Clone)]
struct Candidate {
    genes: Vec<f64>,
    pulse: PulseSpec,
    fitness: f64,
    norm: f64,
}

impl Candidate {
    /// Higher window wins; ties go to the weaker field.
    fn better_than(&self, other: &Candidate) -> bool {
        match self.fitness.partial_cmp(&other.fitness) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Less) => false,
            _ => self.norm < other.norm,
        }
    }
}

/// Decodes genes (amplitudes in units of ω) into a normalized pulse with
/// the cosine's sign convention, `A(t₀) = −π/2`.
fn decode(genes: &[f64], omega: f64, t_peak: f64) -> Result<(PulseSpec, Vec<f64>)> {
    let raw = if genes.len() == 1 {
        PulseSpec::cosine(genes[0] * omega, omega)?
    } else {
        let coeffs: Vec<(u32, f64)> = genes
            .iter()
            .enumerate()
            .map(|(i, g)| (2 * i as u32 + 1, g * omega))
            .collect();
        PulseSpec::harmonic_sum(omega, &coeffs)?
    };
    let mut pulse = normalize_for_transfer(&raw, t_peak)?;
    if pulse.action(t_peak) > 0.0 {
        pulse = pulse.scaled(-1.0);
    }
    let genes = match &pulse {
        PulseSpec::Cosine { chi, .. } => vec![chi / omega],
        PulseSpec::HarmonicSum { coefficients, .. } => coefficients.iter().map(|c| c.amplitude / omega).collect(),
        PulseSpec::GaussianApprox { .. } => unreachable!("search family is periodic"),
    };
    Ok((pulse, genes))
}

fn evaluate(objective: &ShapingObjective, steps: u32, genes: &[f64]) -> Result<Option<Candidate>> {
    let (pulse, genes) = match decode(genes, objective.omega, objective.peak_time()) {
        Ok(d) => d,
        Err(Error::ZeroAction { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let fitness = measure_window(objective, &pulse, steps)?.unwrap_or(f64::NEG_INFINITY);
    let norm = genes.iter().map(|g| g * g).sum::<f64>().sqrt();
    Ok(Some(Candidate {
        genes,
        pulse,
        fitness,
        norm,
    }))
}

fn evaluate_all(objective: &ShapingObjective, steps: u32, genomes: &[Vec<f64>]) -> Result<Vec<Candidate>> {
    let evaluated: Vec<Result<Option<Candidate>>> =
        genomes.par_iter().map(|g| evaluate(objective, steps, g)).collect();
    let mut out = Vec::with_capacity(genomes.len());
    for e in evaluated {
        if let Some(c) = e? {
            out.push(c);
        }
    }
    Ok(out)
}

fn best_of(pop: &[Candidate]) -> &Candidate {
    pop.iter()
        .reduce(|best, c| if c.better_than(best) { c } else { best })
        .expect("population is never empty")
}

/// Searches odd-harmonic sums for the longest populated window.
/// Deterministic for a fixed seed; the best fitness never decreases.
pub fn optimize_pulse(objective: &ShapingObjective, config: &OptimizerConfig) -> Result<OptimizationResult> {
    objective.validate()?;
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, config.mutation_scale).map_err(|e| invalid("mutation_scale", e.to_string()))?;
    let steps = steps_for(config.n_harmonics);

    let mut cosine_genes = vec![0.0; config.n_harmonics];
    cosine_genes[0] = PI / 2.0;
    let mut genomes = vec![cosine_genes.clone()];
    while genomes.len() < config.population_size {
        genomes.push(cosine_genes.iter().map(|g| g + noise.sample(&mut rng)).collect());
    }
    let mut population = evaluate_all(objective, steps, &genomes)?;
    let baseline_duration = population[0].fitness;
    if !baseline_duration.is_finite() {
        return Err(Error::NoViableCandidate);
    }

    let mut elite = best_of(&population).clone();
    let mut history = vec![elite.fitness];

    for _ in 0..config.generations {
        let mut children = Vec::with_capacity(config.population_size - 1);
        while children.len() < config.population_size - 1 {
            let a = tournament(&population, &mut rng);
            let b = tournament(&population, &mut rng);
            let alpha: f64 = rng.gen_range(-0.25..1.25);
            let child: Vec<f64> = a
                .genes
                .iter()
                .zip(&b.genes)
                .map(|(x, y)| alpha * x + (1.0 - alpha) * y + noise.sample(&mut rng))
                .collect();
            children.push(child);
        }
        let mut next = vec![elite.clone()];
        next.extend(evaluate_all(objective, steps, &children)?);
        population = next;
        elite = best_of(&population).clone();
        history.push(elite.fitness);
    }

    Ok(OptimizationResult {
        pulse: elite.pulse,
        achieved_duration: elite.fitness,
        baseline_duration,
        history,
        seed: config.seed,
        config: *config,
        objective: *objective,
    })
}

fn tournament<'a>(pop: &'a [Candidate], rng: &mut ChaCha8Rng) -> &'a Candidate {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if b.better_than(a) {
        b
    } else {
        a
    }
}
