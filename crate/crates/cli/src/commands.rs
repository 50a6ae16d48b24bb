use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde_json::json;
use twolevel::analytic::{design_frequency, leakage_at_peak, populations_from_action, DesignRequest};
use twolevel::hydrogen::{dipole_2s2p, field_for_transfer, lamb_shift, next_level_gap, validity_report};
use twolevel::integrator::{integrate, max_population_deviation, populated_window, Grid, IntegrationConfig};
use twolevel::pulses::{optimize_pulse, OptimizerConfig, ShapingObjective};
use twolevel::units::{hartree_to_ev, HARTREE_EV, INTENSITY_AU_W_CM2, SPEED_OF_LIGHT_AU};
use twolevel::{Error, PulseSpec, Trajectory, TwoLevelAtom};

use crate::manifest::{manifest_path, RunManifest};
use crate::{DesignArgs, OptimizeArgs, SimulateArgs};

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type Outcome = Result<(), Failure>;

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn runtime(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 3,
        error: error.into(),
    }
}

/// Parameter problems are usage errors; everything else failed while running.
fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidParameter { .. } | Error::DerivativeOrder(_) | Error::ZeroAction { .. } => usage(e),
        _ => runtime(e),
    }
}

/// 17 significant digits, enough to round-trip any f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_trajectory(path: &Path, traj: &Trajectory, reference: Option<&PulseSpec>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["t", "P1", "P2", "re_a1", "im_a1", "re_a2", "im_a2"];
    if reference.is_some() {
        header.extend(["P1_analytic", "P2_analytic"]);
    }
    w.write_record(&header)?;
    for (t, s) in traj.iter() {
        let p = s.probabilities();
        let mut row = vec![fmt(t), fmt(p.p1), fmt(p.p2), fmt(s.a1.re), fmt(s.a1.im), fmt(s.a2.re), fmt(s.a2.im)];
        if let Some(pulse) = reference {
            let r = populations_from_action(pulse, t);
            row.push(fmt(r.p1));
            row.push(fmt(r.p2));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

struct SimulationJob {
    label: String,
    pulse: PulseSpec,
    output: PathBuf,
}

fn sweep_output(base: &Path, ratio: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectory");
    base.with_file_name(format!("{stem}_ratio{ratio}.csv"))
}

fn build_pulse(args: &SimulateArgs, omega21: f64) -> Result<PulseSpec, Failure> {
    if let Some(path) = &args.pulse {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading pulse {}", path.display()))
            .map_err(usage)?;
        let pulse: PulseSpec = serde_json::from_str(&text)
            .with_context(|| format!("parsing pulse {}", path.display()))
            .map_err(usage)?;
        pulse.validate().map_err(classify)?;
        return Ok(pulse);
    }
    let omega = match (args.omega, args.ratio) {
        (Some(w), _) => w,
        (None, Some(r)) => r * omega21,
        (None, None) => return Err(usage(anyhow!("one of --omega, --ratio, --pulse or --sweep is required"))),
    };
    let chi = args.chi.unwrap_or(PI / 2.0 * omega);
    PulseSpec::cosine(chi, omega).map_err(classify)
}

fn config_for(args: &SimulateArgs, pulse: &PulseSpec) -> IntegrationConfig {
    let t_end = args.t_end.unwrap_or(args.periods * pulse.grid_scale());
    let grid = match args.step {
        Some(h) => Grid::Step(h),
        None => Grid::StepsPerPeriod(args.steps_per_period),
    };
    IntegrationConfig::new(0.0, t_end).with_grid(grid)
}

/// Max |ΔP₂| against the degenerate limit within `t₀ ± T/8` of the first peak.
fn near_peak_deviation(traj: &Trajectory, pulse: &PulseSpec) -> Option<f64> {
    let omega = pulse.omega()?;
    let t0 = PI / (2.0 * omega);
    let half = PI / (4.0 * omega);
    max_population_deviation(traj, |t| populations_from_action(pulse, t), (t0 - half, t0 + half)).ok()
}

pub fn simulate(args: &SimulateArgs, argv: &[String]) -> Outcome {
    let omega21 = args.omega21.unwrap_or_else(lamb_shift);
    let atom = TwoLevelAtom::with_splitting(omega21).map_err(classify)?;

    let jobs: Vec<SimulationJob> = match &args.sweep {
        Some(ratios) => ratios
            .iter()
            .map(|&r| {
                let omega = r * omega21;
                let chi = args.chi.unwrap_or(PI / 2.0 * omega);
                Ok(SimulationJob {
                    label: format!("ratio {r}"),
                    pulse: PulseSpec::cosine(chi, omega).map_err(classify)?,
                    output: sweep_output(&args.output, r),
                })
            })
            .collect::<Result<_, Failure>>()?,
        None => vec![SimulationJob {
            label: "run".into(),
            pulse: build_pulse(args, omega21)?,
            output: args.output.clone(),
        }],
    };
    for job in &jobs {
        config_for(args, &job.pulse).validate().map_err(classify)?;
    }

    let results: Vec<Result<Trajectory, Error>> = jobs
        .par_iter()
        .map(|job| integrate(&atom, &job.pulse, &config_for(args, &job.pulse)))
        .collect();

    let mut outputs = Vec::new();
    for (job, result) in jobs.iter().zip(results) {
        let traj = result.map_err(classify)?;
        let reference = args.analytic.then_some(&job.pulse);
        write_trajectory(&job.output, &traj, reference).map_err(runtime)?;
        println!(
            "{}: {} rows -> {} (max norm drift {:.3e})",
            job.label,
            traj.len(),
            job.output.display(),
            traj.max_norm_error()
        );
        if let Some(dev) = near_peak_deviation(&traj, &job.pulse) {
            println!("{}: max |P2 - P2_analytic| near first peak = {:.6e}", job.label, dev);
        }
        outputs.push(job.output.clone());
    }

    let parameters = json!({
        "omega21": omega21,
        "pulses": jobs.iter().map(|j| &j.pulse).collect::<Vec<_>>(),
        "periods": args.periods,
        "t_end": args.t_end,
        "steps_per_period": args.steps_per_period,
        "step": args.step,
        "analytic": args.analytic,
    });
    let manifest = RunManifest::new(argv.to_vec(), parameters, None, outputs);
    manifest.write(&manifest_path(&args.output)).map_err(runtime)
}

pub fn design(args: &DesignArgs) -> Outcome {
    let req = DesignRequest::new(args.ts, args.pcr).map_err(classify)?;
    let omega = design_frequency(&req).map_err(classify)?;
    let omega21 = args.omega21.unwrap_or_else(lamb_shift);
    let regime = field_for_transfer(omega).map_err(classify)?;
    let report = validity_report(omega).map_err(classify)?;
    let bound = leakage_at_peak(omega21, omega).map_err(classify)?;

    println!("omega_au: {}", fmt(omega));
    println!("omega_ev: {}", fmt(hartree_to_ev(omega)));
    println!("wavelength_m: {}", fmt(regime.wavelength));
    println!("e0_au: {}", fmt(regime.e0));
    println!("intensity_w_cm2: {}", fmt(regime.intensity));
    println!("leakage_bound: {}", fmt(bound));
    println!("verdict: {}", report.verdict);

    if args.verify {
        let atom = TwoLevelAtom::with_splitting(omega21).map_err(classify)?;
        let pulse = PulseSpec::transfer_cosine(omega).map_err(classify)?;
        let cfg = IntegrationConfig::periods(&pulse, 0.5, 4000);
        let traj = integrate(&atom, &pulse, &cfg).map_err(classify)?;
        let measured = populated_window(&traj, args.pcr).map_err(classify)?;
        println!("measured_ts: {}", fmt(measured));
        println!("measured_over_requested: {}", fmt(measured / args.ts));
    }
    Ok(())
}

pub fn optimize(args: &OptimizeArgs, argv: &[String]) -> Outcome {
    let objective = ShapingObjective {
        leakage_budget: args.pcr,
        omega: args.omega,
        atom: TwoLevelAtom::with_splitting(args.omega21).map_err(classify)?,
        horizon: args.horizon,
    };
    let config = OptimizerConfig {
        population_size: args.population,
        generations: args.generations,
        mutation_scale: args.mutation_scale,
        seed: args.seed,
        n_harmonics: args.n_harmonics,
    };
    objective.validate().map_err(classify)?;
    config.validate().map_err(classify)?;
    let result = optimize_pulse(&objective, &config).map_err(classify)?;

    fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))
        .map_err(runtime)?;
    let pulse_path = args.output.join("pulse.json");
    let history_path = args.output.join("history.csv");
    let summary_path = args.output.join("summary.json");

    let write = || -> anyhow::Result<()> {
        fs::write(&pulse_path, serde_json::to_string_pretty(&result.pulse)? + "\n")?;
        fs::write(&summary_path, serde_json::to_string_pretty(&result)? + "\n")?;
        let mut w = csv::Writer::from_path(&history_path)?;
        w.write_record(["generation", "best_window"])?;
        for (g, f) in result.history.iter().enumerate() {
            w.write_record([g.to_string(), fmt(*f)])?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(runtime)?;

    println!("baseline_ts: {}", fmt(result.baseline_duration));
    println!("achieved_ts: {}", fmt(result.achieved_duration));
    println!("pulse: {}", serde_json::to_string(&result.pulse).map_err(runtime)?);

    let manifest = RunManifest::new(
        argv.to_vec(),
        json!({ "objective": objective, "config": config }),
        Some(args.seed),
        vec![pulse_path, history_path, summary_path],
    );
    manifest.write(&args.output.join("manifest.json")).map_err(runtime)
}

pub fn info() -> Outcome {
    let w21 = lamb_shift();
    let gap = next_level_gap();
    println!("{:<28} {:>24}  unit", "quantity", "value");
    println!("{:<28} {:>24.6e}  eV", "lamb_shift", hartree_to_ev(w21));
    println!("{:<28} {:>24.6e}  a.u.", "lamb_shift", w21);
    println!("{:<28} {:>24.6}  eV", "gap_2s_3p", hartree_to_ev(gap));
    println!("{:<28} {:>24.6e}  a.u.", "gap_2s_3p", gap);
    println!("{:<28} {:>24.6e}  -", "gap_over_lamb_shift", gap / w21);
    println!("{:<28} {:>24.6}  a.u.", "dipole_2s2p", dipole_2s2p().abs());
    println!("{:<28} {:>24.6}  eV/Hartree", "hartree", HARTREE_EV);
    println!("{:<28} {:>24.6}  a.u.", "speed_of_light", SPEED_OF_LIGHT_AU);
    println!("{:<28} {:>24.6e}  W/cm2", "intensity_unit", INTENSITY_AU_W_CM2);
    Ok(())
}

pub fn replay(path: &Path) -> Outcome {
    let manifest = RunManifest::read(path).map_err(usage)?;
    let args = manifest
        .command
        .get(1..)
        .filter(|a| !a.is_empty())
        .ok_or_else(|| usage(anyhow!("manifest {} records no command", path.display())))?;
    if args[0] == "replay" {
        return Err(usage(anyhow!("refusing to replay a replay")));
    }
    let exe = std::env::current_exe().map_err(runtime)?;
    let status = std::process::Command::new(exe).args(args).status().map_err(runtime)?;
    match status.code() {
        Some(0) => Ok(()),
        Some(code) => Err(Failure {
            code: u8::try_from(code).unwrap_or(3),
            error: anyhow!("replayed command exited with status {code}"),
        }),
        None => Err(runtime(anyhow!("replayed command was terminated by a signal"))),
    }
}
