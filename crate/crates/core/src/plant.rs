//! Physical parameter aggregate and the per-mode loads produced by the wings.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::Vector3;

use crate::aero::{self, AeroParams};
use crate::control::WingCommand;
use crate::dynamics::{BodyParams, ContactParams, PlanarLoad, RobotState, Wrench};
use crate::energetics::ActuatorElectrical;
use crate::error::{Error, Result};
use crate::hydrostatics::{flotation_check, FlotationReport, LegGeometry, WaterProperties};
use crate::waveform::{DriveSignal, VoltageEnvelope, WingKinematicsMap, DEFAULT_OFFSET_VOLTAGE};

/// Every physical constant of one robot and its environment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Physics {
    pub body: BodyParams,
    pub aero: AeroParams,
    pub kinematics: WingKinematicsMap,
    pub envelope: VoltageEnvelope,
    pub offset_voltage: f64,
    pub contact: ContactParams,
    pub water: WaterProperties,
    pub legs: LegGeometry,
    pub electrical: ActuatorElectrical,
    pub geometry: RobotGeometry,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            body: BodyParams::default(),
            aero: AeroParams::default(),
            kinematics: WingKinematicsMap::default(),
            envelope: VoltageEnvelope::default(),
            offset_voltage: DEFAULT_OFFSET_VOLTAGE,
            contact: ContactParams::default(),
            water: WaterProperties::default(),
            legs: LegGeometry::default(),
            electrical: ActuatorElectrical::default(),
            geometry: RobotGeometry::default(),
        }
    }
}

impl Physics {
    /// The 95 mg water-walking variant with horizontal legs.
    pub fn water_variant() -> Self {
        Physics {
            body: BodyParams {
                mass: crate::WATER_MASS,
                ..BodyParams::default()
            },
            ..Physics::default()
        }
    }

    /// Collects every parameter violation instead of stopping at the first.
    pub fn violations(&self) -> Vec<String> {
        let checks = [
            self.body.validate(),
            self.aero.validate(),
            self.kinematics.validate(),
            self.contact.validate(),
            self.water.validate(),
            self.legs.validate(),
            self.electrical.validate(),
            self.geometry.validate(),
        ];
        let mut out: Vec<String> = checks
            .into_iter()
            .filter_map(|r| r.err().map(|e| alloc::format!("{e}")))
            .collect();
        if !(self.envelope.min < self.envelope.max) {
            out.push(String::from("envelope: min must be below max"));
        }
        if !(self.offset_voltage > self.envelope.min && self.offset_voltage < self.envelope.max) {
            out.push(String::from("offset_voltage: must lie inside the envelope"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(v))
        }
    }

    pub fn flotation(&self) -> FlotationReport {
        flotation_check(&self.legs, &self.water, self.body.mass)
    }

    pub fn signal(&self, wing: &WingCommand, frequency: f64) -> DriveSignal {
        DriveSignal {
            offset: self.offset_voltage,
            amplitude: wing.amplitude,
            second_harmonic: wing.second_harmonic,
            frequency,
        }
    }

    /// Cycle-mean thrust of one wing (N).
    pub fn wing_thrust(&self, wing: &WingCommand, frequency: f64) -> f64 {
        aero::wing_thrust(&self.signal(wing, frequency), &self.aero)
    }

    /// Cycle-mean horizontal force of one wing at a body airspeed (N).
    pub fn wing_mean_force(&self, wing: &WingCommand, frequency: f64, airspeed: f64) -> f64 {
        aero::cycle_mean_horizontal_force_moving(&self.signal(wing, frequency), &self.kinematics, &self.aero, airspeed)
    }
}

/// Outer dimensions used by the clearance check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RobotGeometry {
    /// Gap between the ground and the underside of the body (m).
    pub leg_standoff: f64,
    /// Body height up to the wing hinge (m).
    pub body_height: f64,
    /// Vertical extent of the flapping wing above the hinge (m).
    pub wing_clearance: f64,
}

impl Default for RobotGeometry {
    fn default() -> Self {
        RobotGeometry {
            leg_standoff: 2e-3,
            body_height: 20e-3,
            wing_clearance: 1e-3,
        }
    }
}

impl RobotGeometry {
    pub fn bounding_height(&self) -> f64 {
        self.leg_standoff + self.body_height + self.wing_clearance
    }

    pub fn validate(&self) -> Result<()> {
        if [self.leg_standoff, self.body_height, self.wing_clearance]
            .iter()
            .any(|v| !(*v >= 0.0))
        {
            return Err(Error::param("geometry", "dimensions must be >= 0"));
        }
        Ok(())
    }
}

/// Commanded drive of both wings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DriveCommand {
    /// Hz
    pub frequency: f64,
    pub left: WingCommand,
    pub right: WingCommand,
}

impl DriveCommand {
    pub fn symmetric(frequency: f64, amplitude: f64, second_harmonic: f64) -> Self {
        let w = WingCommand {
            amplitude,
            second_harmonic,
        };
        DriveCommand {
            frequency,
            left: w,
            right: w,
        }
    }
}

/// Forward speed of the body through the air (m/s).
pub fn body_airspeed(state: &RobotState) -> f64 {
    (state.attitude.inverse() * state.velocity).x
}

/// Cycle-mean body wrench used while airborne.
pub fn airborne_wrench(physics: &Physics, drive: &DriveCommand, state: &RobotState) -> Wrench {
    let u = body_airspeed(state);
    let f = drive.frequency;
    let t_l = physics.wing_thrust(&drive.left, f);
    let t_r = physics.wing_thrust(&drive.right, f);
    let f_l = physics.wing_mean_force(&drive.left, f, u);
    let f_r = physics.wing_mean_force(&drive.right, f, u);
    let b = &physics.body;
    Wrench {
        force: Vector3::new(f_l + f_r, 0.0, t_l + t_r),
        torque: Vector3::new(
            b.thrust_moment_arm * (t_l - t_r),
            b.aero_center_height * (f_l + f_r),
            b.thrust_moment_arm * (f_r - f_l) + b.yaw_bias_torque,
        ),
    }
}

/// Cycle-mean planar load used on water.
pub fn mean_planar_load(physics: &Physics, drive: &DriveCommand, state: &RobotState) -> PlanarLoad {
    let w = airborne_wrench(physics, drive, state);
    PlanarLoad {
        force_x: w.force.x,
        force_y: 0.0,
        yaw_torque: w.torque.z,
        lift: w.force.z,
    }
}

/// Phase-tracking drive generator. The phase is accumulated so that
/// frequency and amplitude changes keep the waveform continuous.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DrivePhase {
    pub phase: f64,
}

impl DrivePhase {
    pub fn advance(&mut self, frequency: f64, dt: f64) {
        self.phase = (self.phase + core::f64::consts::TAU * frequency * dt) % core::f64::consts::TAU;
    }

    /// Equivalent time for evaluating a constant-frequency signal at this phase.
    pub fn local_time(&self, frequency: f64, offset: f64) -> f64 {
        if frequency > 0.0 {
            self.phase / (core::f64::consts::TAU * frequency) + offset
        } else {
            0.0
        }
    }
}

/// Instantaneous planar load on the ground at the current stroke phase.
pub fn ground_planar_load(physics: &Physics, drive: &DriveCommand, phase: &DrivePhase, state: &RobotState) -> PlanarLoad {
    let u = body_airspeed(state);
    let f = drive.frequency;
    let t = phase.local_time(f, 0.0);
    let force = |w: &WingCommand| {
        if f <= 0.0 || w.amplitude == 0.0 {
            return aero::wing_reaction(&physics.aero, 0.0, u);
        }
        let s = physics.signal(w, f);
        aero::wing_reaction(&physics.aero, physics.kinematics.wing_tip_velocity(&s, t), u)
    };
    let f_l = force(&drive.left);
    let f_r = force(&drive.right);
    let b = &physics.body;
    PlanarLoad {
        force_x: f_l + f_r,
        force_y: 0.0,
        yaw_torque: b.thrust_moment_arm * (f_r - f_l) + b.yaw_bias_torque,
        lift: physics.wing_thrust(&drive.left, f) + physics.wing_thrust(&drive.right, f),
    }
}

/// Voltage and current of one actuator at a phase.
pub fn actuator_sample(physics: &Physics, wing: &WingCommand, frequency: f64, phase: f64) -> (f64, f64) {
    let mu = wing.second_harmonic;
    let a = wing.amplitude;
    let v = physics.offset_voltage + a * (libm::sin(phase) + mu * libm::sin(2.0 * phase));
    let w = core::f64::consts::TAU * frequency;
    let dv = a * w * (libm::cos(phase) + 2.0 * mu * libm::cos(2.0 * phase));
    (v, physics.electrical.capacitance * dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn defaults_are_valid() {
        assert!(Physics::default().violations().is_empty());
        assert!(Physics::water_variant().flotation().floats());
    }

    #[test]
    fn violations_are_all_listed() {
        let mut p = Physics::default();
        p.body.mass = -1.0;
        p.aero.air_density = 0.0;
        p.offset_voltage = 1e4;
        assert_eq!(p.violations().len(), 3);
    }

    #[test]
    fn hover_trim_wrench() {
        let p = Physics::default();
        let d = DriveCommand::symmetric(140.0, 250.0, 0.0);
        let w = airborne_wrench(&p, &d, &crate::dynamics::RobotState::at_rest(crate::dynamics::Mode::Airborne));
        assert_relative_eq!(w.force.z, p.body.weight(), max_relative = 1e-12);
        assert!(w.force.x.abs() < 1e-15);
        assert!(w.torque.norm() < 1e-15);
    }

    #[test]
    fn stronger_right_wing_yaws_left() {
        let p = Physics::water_variant();
        let mut d = DriveCommand::symmetric(35.0, 220.0, 0.3);
        d.left.amplitude = 180.0;
        let s = crate::dynamics::RobotState::at_rest(crate::dynamics::Mode::WaterSurface);
        assert!(mean_planar_load(&p, &d, &s).yaw_torque > 0.0);
    }

    #[test]
    fn actuator_sample_matches_signal() {
        let p = Physics::default();
        let w = WingCommand {
            amplitude: 200.0,
            second_harmonic: 0.2,
        };
        let s = p.signal(&w, 80.0);
        let t = 0.0031;
        let (v, i) = actuator_sample(&p, &w, 80.0, s.omega() * t);
        assert_relative_eq!(v, s.voltage_at(t), max_relative = 1e-12);
        assert_relative_eq!(i, p.electrical.capacitance * s.voltage_rate(t), max_relative = 1e-9);
    }
}
