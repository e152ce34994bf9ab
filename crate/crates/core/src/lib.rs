//! Simulation and design-analysis core for an insect-scale flapping-wing robot.
//!
//! The crate is `no_std` (with `alloc`) and contains no IO. It covers the
//! two-harmonic actuator drive, quasi-steady wing drag and thrust, rigid-body
//! dynamics in flight, on the ground and on a water surface, the cascaded
//! hover controller, motion-capture emulation, water-strider leg statics,
//! actuator energetics and a deterministic scenario runner.
//!
//! File formats, configuration and the command line live in the `flapsim`
//! companion crate.

#![no_std]
// NaN must fail parameter checks, so `!(x > 0.0)` is intended
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod aero;
pub mod control;
pub mod dynamics;
pub mod energetics;
pub mod error;
pub mod filter;
pub mod hydrostatics;
pub mod plant;
pub mod quadrature;
pub mod scenario;
pub mod sensors;
pub mod waveform;

pub use error::Error;

/// Standard gravity used throughout unless a parameter block overrides it.
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Mass of the flight configuration (kg).
pub const FLIGHT_MASS: f64 = 74e-6;

/// Mass of the water-surface configuration with horizontal legs (kg).
pub const WATER_MASS: f64 = 95e-6;
