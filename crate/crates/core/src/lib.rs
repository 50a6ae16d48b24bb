//! Population transfer in a driven two-level system.
//!
//! The hydrogen 2s–2p pair is the reference instance: a tiny splitting
//! `ω₂₁` (the Lamb shift) driven by a field far below the next resonance.
//! In the degenerate limit the amplitude equations solve in closed form
//! and a cosine drive with `χ/ω = π/2` moves the population completely
//! back and forth. This crate provides
//!
//! * [`model`]: atoms, pulse shapes, amplitudes and trajectories,
//! * [`analytic`]: the closed-form solutions, flat-top expansion, frequency
//!   design and leakage estimates,
//! * [`integrator`]: fixed-step RK4 for finite `ω₂₁` and arbitrary pulses,
//! * [`pulses`]: normalization, flatness analysis and a GA pulse search,
//! * [`hydrogen`]: the 2s–2p numbers and field regimes.
//!
//! All quantities are in atomic units.

pub mod analytic;
pub mod error;
pub mod hydrogen;
pub mod integrator;
pub mod model;
pub mod pulses;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
pub use model::{action, probabilities, pulse_value, AmplitudeState, Populations, PulseSpec, Trajectory, TwoLevelAtom};
