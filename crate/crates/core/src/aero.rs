//! Quasi-steady wing aerodynamics.
//!
//! Horizontal forces come from drag quadratic in wing speed; the vertical
//! thrust is a lumped linear function of drive amplitude weighted by the
//! flapping resonance.

use core::f64::consts::{PI, TAU};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadrature::{bisect, gauss_legendre_split};
use crate::waveform::{velocity_zeros, DriveSignal, WingKinematicsMap, NOMINAL_AMPLITUDE};
use crate::{FLIGHT_MASS, STANDARD_GRAVITY};

/// Slope of the period-mean of `c|c|` with `c = cos x + 2 mu cos 2x`, at `mu = 0`.
pub const RECTIFICATION_SLOPE: f64 = 8.0 / (3.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AeroParams {
    pub drag_coefficient: f64,
    /// kg/m^3
    pub air_density: f64,
    /// Drag reference area of one wing (m^2).
    pub wing_area: f64,
    /// Cycle-mean thrust of both wings per volt of amplitude at resonance (N/V).
    pub thrust_per_volt: f64,
    /// Hz
    pub resonant_frequency: f64,
    /// Damping ratio of the second-order flapping resonance.
    pub resonance_damping: f64,
}

impl Default for AeroParams {
    fn default() -> Self {
        AeroParams {
            drag_coefficient: 1.5,
            air_density: 1.2,
            wing_area: WingKinematicsMap::default().planform_area(),
            // hover of the 74 mg robot at resonance needs the nominal 250 V
            thrust_per_volt: FLIGHT_MASS * STANDARD_GRAVITY / NOMINAL_AMPLITUDE,
            resonant_frequency: 140.0,
            resonance_damping: 0.05,
        }
    }
}

impl AeroParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.drag_coefficient > 0.0) {
            return Err(Error::param("drag_coefficient", "must be > 0"));
        }
        if !(self.air_density > 0.0) {
            return Err(Error::param("air_density", "must be > 0"));
        }
        // zero area is the rod-replacement control case
        if !(self.wing_area >= 0.0) {
            return Err(Error::param("wing_area", "must be >= 0"));
        }
        if !(self.thrust_per_volt >= 0.0) {
            return Err(Error::param("thrust_per_volt", "must be >= 0"));
        }
        if !(self.resonant_frequency > 0.0) {
            return Err(Error::param("resonant_frequency", "must be > 0"));
        }
        if !(self.resonance_damping > 0.0) {
            return Err(Error::param("resonance_damping", "must be > 0"));
        }
        Ok(())
    }

    /// `0.5 C_D rho A`.
    pub fn drag_constant(&self) -> f64 {
        0.5 * self.drag_coefficient * self.air_density * self.wing_area
    }

    /// Resonance weight `g(f / f_res)`, normalised so that `g(1) = 1`.
    ///
    /// Acceleration-type second-order response `r^2 |H(r)| / |H(1)|`.
    pub fn frequency_weight(&self, frequency: f64) -> f64 {
        let r = frequency / self.resonant_frequency;
        let z = self.resonance_damping;
        let r2 = r * r;
        let den = libm::sqrt((1.0 - r2) * (1.0 - r2) + (2.0 * z * r) * (2.0 * z * r));
        r2 * 2.0 * z / den
    }
}

/// Drag on a wing moving at `wing_velocity` through still air (N, signed).
pub fn instantaneous_wing_drag(params: &AeroParams, wing_velocity: f64) -> f64 {
    -params.drag_constant() * wing_velocity * wing_velocity.abs()
}

/// Horizontal force on the body along body `x` from one wing.
///
/// Positive stroke sweeps the wing toward the tail, so the wing moves at
/// `-stroke_velocity` in the body frame and at `body_airspeed - stroke_velocity`
/// relative to the air.
pub fn wing_reaction(params: &AeroParams, stroke_velocity: f64, body_airspeed: f64) -> f64 {
    instantaneous_wing_drag(params, body_airspeed - stroke_velocity)
}

fn stroke_breakpoints(signal: &DriveSignal, map: &WingKinematicsMap) -> Vec<f64> {
    let mut phases = velocity_zeros(signal.second_harmonic);
    phases.extend(map.clip_phases(signal));
    phases
}

/// Period-mean horizontal body force from one wing with the body at rest (N).
///
/// The integrand is split at velocity zeros and stop contacts, then each
/// smooth piece is integrated by Gauss-Legendre.
pub fn cycle_mean_horizontal_force(
    signal: &DriveSignal,
    map: &WingKinematicsMap,
    params: &AeroParams,
) -> f64 {
    if params.wing_area == 0.0 || signal.amplitude == 0.0 {
        return 0.0;
    }
    let w = signal.omega();
    let breaks = stroke_breakpoints(signal, map);
    let integral = gauss_legendre_split(
        |phase| {
            let t = phase / w;
            wing_reaction(params, map.wing_tip_velocity(signal, t), 0.0)
        },
        0.0,
        TAU,
        &breaks,
        8,
    );
    integral / TAU
}

/// Period-mean horizontal force from one wing with the body moving at
/// `body_airspeed` along body `x` (N).
pub fn cycle_mean_horizontal_force_moving(
    signal: &DriveSignal,
    map: &WingKinematicsMap,
    params: &AeroParams,
    body_airspeed: f64,
) -> f64 {
    if body_airspeed == 0.0 {
        return cycle_mean_horizontal_force(signal, map, params);
    }
    if params.wing_area == 0.0 {
        return 0.0;
    }
    if signal.amplitude == 0.0 {
        return wing_reaction(params, 0.0, body_airspeed);
    }
    let w = signal.omega();
    let rel = |phase: f64| body_airspeed - map.wing_tip_velocity(signal, phase / w);
    let mut breaks = stroke_breakpoints(signal, map);
    // zeros of the relative air velocity, where the integrand has a kink
    let n = 256;
    let step = TAU / n as f64;
    for i in 0..n {
        let (a, b) = (step * i as f64, step * (i + 1) as f64);
        if rel(a) * rel(b) < 0.0 {
            breaks.push(bisect(rel, a, b));
        }
    }
    let integral = gauss_legendre_split(
        |phase| wing_reaction(params, map.wing_tip_velocity(signal, phase / w), body_airspeed),
        0.0,
        TAU,
        &breaks,
        8,
    );
    integral / TAU
}

/// Largest instantaneous horizontal force magnitude over a period (dense sampling).
pub fn peak_horizontal_force(signal: &DriveSignal, map: &WingKinematicsMap, params: &AeroParams) -> f64 {
    let n = 4096;
    (0..n)
        .map(|i| {
            let t = signal.period() * i as f64 / n as f64;
            wing_reaction(params, map.wing_tip_velocity(signal, t), 0.0).abs()
        })
        .fold(0.0, f64::max)
}

/// `d F / d mu` at `mu = 0` for one unclipped wing.
pub fn horizontal_force_slope(
    amplitude: f64,
    frequency: f64,
    map: &WingKinematicsMap,
    params: &AeroParams,
) -> f64 {
    let speed = map.stroke_gain * amplitude * TAU * frequency * map.characteristic_radius();
    params.drag_constant() * speed * speed * RECTIFICATION_SLOPE
}

/// Cycle-mean vertical thrust of both wings driven by `signal` (N).
pub fn cycle_mean_thrust(signal: &DriveSignal, params: &AeroParams) -> f64 {
    (params.thrust_per_volt * signal.amplitude * params.frequency_weight(signal.frequency)).max(0.0)
}

/// Thrust of a single wing (half of the pair value at the same amplitude).
pub fn wing_thrust(signal: &DriveSignal, params: &AeroParams) -> f64 {
    0.5 * cycle_mean_thrust(signal, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sig(a0: f64, mu: f64, f: f64) -> DriveSignal {
        DriveSignal::new(350.0, a0, mu, f).unwrap()
    }

    // brute-force midpoint oracle, independent of the split quadrature
    fn brute_mean(s: &DriveSignal, map: &WingKinematicsMap, p: &AeroParams, n: usize) -> f64 {
        let k = p.drag_constant();
        let r = map.characteristic_radius();
        let lim = 0.5 * map.max_stroke_amplitude;
        let mut acc = 0.0;
        for i in 0..n {
            let x = TAU * (i as f64 + 0.5) / n as f64;
            let shape = x.sin() + s.second_harmonic * (2.0 * x).sin();
            let stroke = map.stroke_gain * s.amplitude * shape;
            let v = if stroke.abs() >= lim {
                0.0
            } else {
                map.stroke_gain * s.amplitude * s.omega() * (x.cos() + 2.0 * s.second_harmonic * (2.0 * x).cos()) * r
            };
            acc += k * v * v.abs();
        }
        acc / n as f64
    }

    #[test]
    fn drag_examples() {
        let p = AeroParams {
            drag_coefficient: 1.0,
            air_density: 1.2,
            wing_area: 1e-4,
            ..AeroParams::default()
        };
        assert_eq!(instantaneous_wing_drag(&p, 0.0), 0.0);
        assert_relative_eq!(instantaneous_wing_drag(&p, 1.0), -6.0e-5, max_relative = 1e-12);
        assert_eq!(instantaneous_wing_drag(&p, 2.3), -instantaneous_wing_drag(&p, -2.3));
        assert_eq!(instantaneous_wing_drag(&p, 2.0 * 0.7), 4.0 * instantaneous_wing_drag(&p, 0.7));
    }

    #[test]
    fn frequency_weight_normalised() {
        let p = AeroParams::default();
        assert_relative_eq!(p.frequency_weight(140.0), 1.0, epsilon = 1e-15);
        let mut prev = 0.0;
        for f in (10..=140).step_by(10) {
            let g = p.frequency_weight(f as f64);
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn hover_calibration() {
        let p = AeroParams::default();
        let t = cycle_mean_thrust(&sig(250.0, 0.0, 140.0), &p);
        assert_relative_eq!(t, 74e-6 * 9.81, max_relative = 1e-12);
        assert_relative_eq!(t, 7.26e-4, max_relative = 1e-3);
    }

    #[test]
    fn thrust_linear_in_amplitude() {
        let p = AeroParams::default();
        assert_eq!(cycle_mean_thrust(&sig(0.0, 0.0, 140.0), &p), 0.0);
        let a = cycle_mean_thrust(&sig(100.0, 0.0, 120.0), &p);
        let b = cycle_mean_thrust(&sig(200.0, 0.0, 120.0), &p);
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-14);
    }

    #[test]
    fn symmetric_drive_gives_no_net_force() {
        let map = WingKinematicsMap::default();
        let p = AeroParams::default();
        let s = sig(220.0, 0.0, 60.0);
        let f = cycle_mean_horizontal_force(&s, &map, &p);
        assert!(f.abs() < 1e-10 * peak_horizontal_force(&s, &map, &p));
    }

    #[test]
    fn second_harmonic_matches_brute_force() {
        let map = WingKinematicsMap::default();
        let p = AeroParams::default();
        for &(a0, mu) in &[(150.0, 0.3), (210.0, 0.3), (300.0, 0.3), (250.0, -0.2)] {
            let s = sig(a0, mu, 60.0);
            let fast = cycle_mean_horizontal_force(&s, &map, &p);
            let slow = brute_mean(&s, &map, &p, 1_000_000);
            // the midpoint oracle is first order across a stop contact
            let tol = if map.clips(&s) { 1e-5 } else { 1e-9 };
            assert_relative_eq!(fast, slow, max_relative = tol);
            assert_eq!(fast > 0.0, mu > 0.0);
        }
    }

    #[test]
    fn antisymmetric_in_second_harmonic() {
        let map = WingKinematicsMap::default();
        let p = AeroParams::default();
        for &a0 in &[120.0, 250.0, 320.0] {
            let plus = cycle_mean_horizontal_force(&sig(a0, 0.3, 45.0), &map, &p);
            let minus = cycle_mean_horizontal_force(&sig(a0, -0.3, 45.0), &map, &p);
            assert_relative_eq!(plus, -minus, max_relative = 1e-9);
        }
    }

    #[test]
    fn rods_produce_nothing() {
        let map = WingKinematicsMap::default();
        let p = AeroParams {
            wing_area: 0.0,
            ..AeroParams::default()
        };
        assert_eq!(cycle_mean_horizontal_force(&sig(210.0, 0.3, 60.0), &map, &p), 0.0);
    }

    #[test]
    fn quadrature_converged() {
        let map = WingKinematicsMap::default();
        let p = AeroParams::default();
        let s = sig(280.0, 0.25, 70.0);
        let w = s.omega();
        let breaks = stroke_breakpoints(&s, &map);
        let f = |n| {
            gauss_legendre_split(
                |x| wing_reaction(&p, map.wing_tip_velocity(&s, x / w), 0.0),
                0.0,
                TAU,
                &breaks,
                n,
            ) / TAU
        };
        let coarse = f(4);
        let fine = f(8);
        assert!(((coarse - fine) / fine).abs() < 1e-8);
    }

    #[test]
    fn slope_matches_numeric_derivative() {
        let map = WingKinematicsMap::default();
        let p = AeroParams::default();
        let h = 1e-4;
        let plus = cycle_mean_horizontal_force(&sig(200.0, h, 140.0), &map, &p);
        let minus = cycle_mean_horizontal_force(&sig(200.0, -h, 140.0), &map, &p);
        let numeric = (plus - minus) / (2.0 * h);
        assert_relative_eq!(numeric, horizontal_force_slope(200.0, 140.0, &map, &p), max_relative = 1e-6);
    }

    #[test]
    fn moving_body_mean_matches_brute_force() {
        let map = WingKinematicsMap::default();
        let p = AeroParams::default();
        let s = sig(250.0, 0.2, 140.0);
        let u = 0.4;
        let n = 400_000;
        let k = p.drag_constant();
        let oracle: f64 = (0..n)
            .map(|i| {
                let t = s.period() * (i as f64 + 0.5) / n as f64;
                let rel = u - map.wing_tip_velocity(&s, t);
                -k * rel * rel.abs()
            })
            .sum::<f64>()
            / n as f64;
        let got = cycle_mean_horizontal_force_moving(&s, &map, &p, u);
        assert_relative_eq!(got, oracle, max_relative = 1e-6);
        // moving forward through still air costs drag
        assert!(got < cycle_mean_horizontal_force(&s, &map, &p));
        assert_eq!(
            cycle_mean_horizontal_force_moving(&s, &map, &p, 0.0),
            cycle_mean_horizontal_force(&s, &map, &p)
        );
    }
}
