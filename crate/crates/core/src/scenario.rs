//! Scenario description, the fixed-rate simulation loop and the sweeps built on it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{UnitQuaternion, Vector3};

use crate::control::{ControlOutput, Controller, ControllerGains, ControllerLimits, Mixer, Setpoint, CONTROL_RATE};
use crate::dynamics::{
    self, detect_mode_transition, ground_step, touch_down, water_step, Event, Mode, RobotState, Surface,
    PlanarLoad, TouchdownOutcome, WaterSettle, Wrench, DEFAULT_STEP, MAX_STEP,
};
use crate::energetics::{cost_of_transport, CostOfTransport, EnergyTrace, PowerSample, MIN_TRANSPORT_DISTANCE};
use crate::error::{Error, Result};
use crate::plant::{
    actuator_sample, airborne_wrench, ground_planar_load, mean_planar_load, DriveCommand, DrivePhase, Physics,
    RobotGeometry,
};
use crate::sensors::{MotionCapture, SensorConfig};

/// Water drag coefficients derived from the straight-line and turning anchors
/// (0.5 cm/s at 35 Hz, 220 V, mu 0.3; 20 deg/s with 220 V right, 180 V left).
pub mod calibration {
    /// N s/m
    pub const WATER_LINEAR_DRAG: f64 = 4.3e-3;
    /// N m s/rad
    pub const WATER_YAW_DRAG: f64 = 6.1e-8;
    pub const WATER_SPEED_ANCHOR: f64 = 5e-3;
    /// rad/s
    pub const WATER_YAW_RATE_ANCHOR: f64 = 20.0 * core::f64::consts::PI / 180.0;
}

/// Flapping frequency used for flight.
pub const FLIGHT_FREQUENCY: f64 = 140.0;

/// Ground cells whose thrust reaches this fraction of the weight are in the
/// lift-off regime and are left out of ground speed tables.
pub const LIFTOFF_REGIME_THRUST_RATIO: f64 = 0.8;

/// Setpoint active from `time`, linearly interpolated toward the next key.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SetpointKey {
    pub time: f64,
    pub setpoint: Setpoint,
}

/// Drive held constant from `time` until the next key.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriveKey {
    pub time: f64,
    pub drive: DriveCommand,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClosedLoop {
    pub gains: ControllerGains,
    pub limits: ControllerLimits,
    pub frequency: f64,
    pub setpoints: Vec<SetpointKey>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Control {
    OpenLoop(Vec<DriveKey>),
    ClosedLoop(ClosedLoop),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct InitialState {
    /// m; a positive height starts the run airborne.
    pub position: [f64; 3],
    /// m/s, world frame.
    pub velocity: [f64; 3],
    /// Roll, pitch, yaw (deg).
    pub attitude_deg: [f64; 3],
}

impl InitialState {
    pub fn state(&self, surface: Surface) -> RobotState {
        let [r, p, y] = self.attitude_deg.map(f64::to_radians);
        let airborne = self.position[2] > 0.0;
        let mut s = RobotState {
            position: Vector3::from(self.position),
            velocity: Vector3::from(self.velocity),
            attitude: UnitQuaternion::from_euler_angles(r, p, y),
            body_rates: Vector3::zeros(),
            mode: if airborne { Mode::Airborne } else { surface.contact_mode() },
            time: 0.0,
        };
        if !airborne {
            s.position.z = 0.0;
            s.velocity.z = 0.0;
            s.attitude = UnitQuaternion::from_euler_angles(0.0, 0.0, y);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub surface: Surface,
    pub initial: InitialState,
    pub control: Control,
    /// s
    pub duration: f64,
    /// Requested physics step (s); shortened so that it divides the control period.
    pub dt: f64,
    pub sensor: SensorConfig,
    pub physics: Physics,
    /// Stop driving the wings at the first touchdown.
    pub cut_on_touchdown: bool,
}

impl Scenario {
    pub fn new(name: &str, surface: Surface, control: Control, duration: f64) -> Self {
        let physics = match surface {
            Surface::Ground => Physics::default(),
            Surface::Water => Physics::water_variant(),
        };
        Scenario {
            name: String::from(name),
            surface,
            initial: InitialState::default(),
            control,
            duration,
            dt: DEFAULT_STEP,
            sensor: SensorConfig::default(),
            physics,
            cut_on_touchdown: false,
        }
    }

    /// Every violation found, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            out.push(format!("duration: {} must be > 0", self.duration));
        }
        if !(self.dt > 0.0 && self.dt <= MAX_STEP) {
            out.push(format!("dt: {} outside (0, {MAX_STEP}]", self.dt));
        }
        if self.initial.position.iter().chain(&self.initial.velocity).chain(&self.initial.attitude_deg).any(|v| !v.is_finite()) {
            out.push(String::from("initial: values must be finite"));
        }
        if let Err(e) = self.sensor.validate() {
            out.push(format!("sensor: {e}"));
        }
        out.extend(self.physics.violations().into_iter().map(|v| format!("physics: {v}")));
        if self.surface == Surface::Water {
            let report = self.physics.flotation();
            if !report.floats() {
                out.push(format!(
                    "legs: flotation margin {:.3e} N is not positive for mass {} kg",
                    report.flotation_margin, self.physics.body.mass
                ));
            }
        }
        match &self.control {
            Control::OpenLoop(keys) => {
                if keys.is_empty() {
                    out.push(String::from("drive: schedule is empty"));
                }
                if !strictly_increasing(keys.iter().map(|k| k.time)) {
                    out.push(String::from("drive: key times must be strictly increasing"));
                }
                for (i, k) in keys.iter().enumerate() {
                    out.extend(self.drive_violations(&k.drive).into_iter().map(|v| format!("drive[{i}]: {v}")));
                }
            }
            Control::ClosedLoop(c) => {
                if let Err(e) = c.gains.validate() {
                    out.push(format!("gains: {e}"));
                }
                if let Err(e) = c.limits.validate() {
                    out.push(format!("limits: {e}"));
                }
                if !(c.frequency > 0.0) {
                    out.push(String::from("frequency: must be > 0"));
                }
                if c.setpoints.is_empty() {
                    out.push(String::from("setpoints: schedule is empty"));
                }
                if !strictly_increasing(c.setpoints.iter().map(|k| k.time)) {
                    out.push(String::from("setpoints: key times must be strictly increasing"));
                }
                if c.setpoints.iter().any(|k| !k.setpoint.is_finite() || !k.time.is_finite()) {
                    out.push(String::from("setpoints: values must be finite"));
                }
            }
        }
        out
    }

    fn drive_violations(&self, d: &DriveCommand) -> Vec<String> {
        let mut out = Vec::new();
        if !(d.frequency >= 0.0 && d.frequency.is_finite()) {
            out.push(format!("frequency {} must be >= 0", d.frequency));
        }
        for (side, w) in [("left", &d.left), ("right", &d.right)] {
            let s = self.physics.signal(w, d.frequency.max(1.0));
            if let Err(e) = s.validate() {
                out.push(format!("{side}: {e}"));
            } else if let Err(e) = s.check_envelope(&self.physics.envelope) {
                out.push(format!("{side}: {e}"));
            }
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

    /// Physics substeps per control tick and the resulting step.
    pub fn substeps(&self) -> (usize, f64) {
        let period = 1.0 / CONTROL_RATE;
        let n = libm::ceil(period / self.dt - 1e-9).max(1.0) as usize;
        (n, period / n as f64)
    }
}

fn strictly_increasing(mut times: impl Iterator<Item = f64>) -> bool {
    let Some(mut prev) = times.next() else {
        return true;
    };
    for t in times {
        if !(t > prev) {
            return false;
        }
        prev = t;
    }
    true
}

/// Setpoint at `t`: linear between keys, held outside them.
pub fn setpoint_at(keys: &[SetpointKey], t: f64) -> Setpoint {
    let Some(first) = keys.first() else {
        return Setpoint::default();
    };
    if t <= first.time {
        return first.setpoint;
    }
    for w in keys.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if t < b.time {
            let s = (t - a.time) / (b.time - a.time);
            return Setpoint {
                position: a.setpoint.position.lerp(&b.setpoint.position, s),
                velocity: a.setpoint.velocity.lerp(&b.setpoint.velocity, s),
            };
        }
    }
    keys[keys.len() - 1].setpoint
}

/// Drive of the last key at or before `t`; nothing before the first key.
pub fn drive_at(keys: &[DriveKey], t: f64) -> DriveCommand {
    keys.iter()
        .take_while(|k| k.time <= t)
        .last()
        .map(|k| k.drive)
        .unwrap_or_default()
}

/// One trajectory log row, written at every control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub state: RobotState,
    pub setpoint: Option<Setpoint>,
    pub drive: DriveCommand,
    pub control: Option<ControlOutput>,
}

/// Receives log data as the run proceeds.
pub trait Recorder {
    fn trajectory(&mut self, _row: &TrajectoryRow) {}
    fn power(&mut self, _sample: &PowerSample) {}
    fn event(&mut self, _time: f64, _event: &Event) {}
}

pub struct NullRecorder;

impl Recorder for NullRecorder {}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub final_state: RobotState,
    pub events: Vec<(f64, Event)>,
    pub landing: Option<TouchdownOutcome>,
    pub touchdown_speed: Option<f64>,
    /// Over the final second; closed-loop runs only (m).
    pub rms_error: Option<[f64; 3]>,
    /// First time the height came within 5 mm of its setpoint.
    pub altitude_reached_at: Option<f64>,
    pub displacement: Vector3<f64>,
    pub path_length: f64,
    /// Horizontal displacement over the duration (m/s).
    pub mean_speed: f64,
    /// Net heading change over the duration (rad/s).
    pub mean_yaw_rate: f64,
    pub rectified_energy: f64,
    pub signed_energy: f64,
    pub mean_power: f64,
    pub cost_of_transport: CostOfTransport,
    pub saturation_count: usize,
    pub duration: f64,
    pub physics_step: f64,
}

fn wrap_angle(a: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let r = a % tau;
    if r > core::f64::consts::PI {
        r - tau
    } else if r < -core::f64::consts::PI {
        r + tau
    } else {
        r
    }
}

/// Runs a scenario to completion.
///
/// The controller and sensor run at exactly `CONTROL_RATE`; wing commands are
/// held between ticks. Airborne and water motion use the cycle-mean wing
/// loads evaluated at each tick; ground motion uses the instantaneous stroke
/// drag at every physics step.
pub fn run(sc: &Scenario, rec: &mut dyn Recorder) -> Result<RunSummary> {
    sc.validate()?;
    let physics = &sc.physics;
    let (substeps, h) = sc.substeps();
    let period = 1.0 / CONTROL_RATE;
    let ticks = libm::ceil(sc.duration / period - 1e-9) as usize;
    let flotation = physics.flotation();
    let leg_spacing = physics.legs.spacing;

    let mut state = sc.initial.state(sc.surface);
    let start = state;
    let mut mocap = MotionCapture::new(sc.sensor)?;
    let mut controller = match &sc.control {
        Control::ClosedLoop(c) => {
            let mut mixer = Mixer::new(physics.body, physics.aero, physics.kinematics, c.frequency);
            mixer.envelope = physics.envelope;
            mixer.offset = physics.offset_voltage;
            mixer.max_second_harmonic = c.limits.max_second_harmonic;
            Some(Controller::new(c.gains, c.limits, mixer)?)
        }
        Control::OpenLoop(_) => None,
    };

    let mut phase = DrivePhase::default();
    let mut energy = EnergyTrace::new();
    let power_dt = 1.0 / physics.electrical.sample_rate;
    let mut power_k: u64 = 0;
    let mut events: Vec<(f64, Event)> = Vec::new();
    let mut settle: Option<WaterSettle> = None;
    let mut cut = false;
    let mut halted = false;
    let mut bound = false;
    let mut saturation_count = 0;
    let mut errors: Vec<(f64, Vector3<f64>)> = Vec::new();
    let mut reached: Option<f64> = None;
    let mut path = 0.0;
    let mut heading_change = 0.0;
    let mut prev_pos = state.position;
    let mut prev_heading = state.heading();

    fn emit(t: f64, e: Event, events: &mut Vec<(f64, Event)>, rec: &mut dyn Recorder) {
        rec.event(t, &e);
        events.push((t, e));
    }

    for tick in 0..=ticks {
        let t = tick as f64 * period;
        state.time = t;
        path += (state.position - prev_pos).norm();
        heading_change += wrap_angle(state.heading() - prev_heading);
        prev_pos = state.position;
        prev_heading = state.heading();

        let sample = mocap.measure(&state);
        let (drive, setpoint, output) = match (&sc.control, controller.as_mut()) {
            (Control::ClosedLoop(c), Some(ctl)) => {
                let sp = setpoint_at(&c.setpoints, t);
                let out = ctl.update(&sample, &sp);
                if out.saturated && !cut {
                    saturation_count += 1;
                }
                let d = DriveCommand {
                    frequency: c.frequency,
                    left: out.left,
                    right: out.right,
                };
                (d, Some(sp), Some(out))
            }
            (Control::OpenLoop(keys), _) => (drive_at(keys, t), None, None),
            _ => unreachable!(),
        };
        let mut drive = if cut { DriveCommand::default() } else { drive };

        if let Some(sp) = setpoint {
            let e = state.position - sp.position;
            if t >= sc.duration - 1.0 - 1e-9 {
                errors.push((t, e));
            }
            if reached.is_none() && e.z.abs() < 5e-3 && state.mode == Mode::Airborne {
                reached = Some(t);
            }
        }
        rec.trajectory(&TrajectoryRow {
            state,
            setpoint,
            drive,
            control: output,
        });
        if tick == ticks || halted {
            break;
        }

        // cycle-mean loads are held for the tick, evaluated on first use
        let mut wrench: Option<Wrench> = None;
        let mut water_load: Option<PlanarLoad> = None;

        for s in 0..substeps {
            let t0 = t + s as f64 * h;
            // power samples on the uniform grid inside [t0, t0 + h)
            loop {
                let tp = power_k as f64 * power_dt;
                if tp >= t0 + h - 1e-12 || tp > sc.duration + 1e-12 {
                    break;
                }
                let ph = phase.phase + core::f64::consts::TAU * drive.frequency * (tp - t0);
                let (vl, il) = actuator_sample(physics, &drive.left, drive.frequency, ph);
                let (vr, ir) = actuator_sample(physics, &drive.right, drive.frequency, ph);
                let p = PowerSample::new(tp, vl, il, vr, ir);
                energy.push(p);
                rec.power(&p);
                power_k += 1;
            }

            match state.mode {
                Mode::Airborne => {
                    let w = *wrench.get_or_insert_with(|| airborne_wrench(physics, &drive, &state));
                    state = dynamics::step(&state, &w, &physics.body, h)?;
                    if let Some(tr) = detect_mode_transition(&state, &physics.contact, sc.surface, Some(&flotation)) {
                        state = touch_down(&state, sc.surface);
                        if let Event::Touchdown { outcome, .. } = tr.event {
                            match outcome {
                                TouchdownOutcome::Upright => {
                                    if sc.surface == Surface::Water {
                                        settle = Some(WaterSettle::new(&state, leg_spacing));
                                    }
                                }
                                TouchdownOutcome::Toppled | TouchdownOutcome::FilmBroken => halted = true,
                            }
                        }
                        if sc.cut_on_touchdown {
                            cut = true;
                            drive = DriveCommand::default();
                            wrench = None;
                            water_load = None;
                        }
                        emit(state.time, tr.event, &mut events, rec);
                    }
                }
                Mode::Ground => {
                    let load = ground_planar_load(physics, &drive, &phase, &state);
                    let (next, ev) = ground_step(&state, &load, &physics.body, &physics.contact, h)?;
                    state = next;
                    if let Some(e) = ev {
                        emit(state.time, e, &mut events, rec);
                    }
                }
                Mode::WaterSurface => {
                    let load = *water_load.get_or_insert_with(|| mean_planar_load(physics, &drive, &state));
                    let (mut next, ev) = water_step(&state, &load, &flotation, &physics.body, &physics.contact, h)?;
                    match ev {
                        Some(e) if !bound => {
                            bound = true;
                            emit(next.time, e, &mut events, rec);
                        }
                        None => bound = false,
                        _ => {}
                    }
                    if let Some(st) = settle.as_mut() {
                        for e in st.step(&physics.contact, h) {
                            emit(next.time, e, &mut events, rec);
                        }
                        st.apply(&mut next);
                        if st.is_settled() {
                            settle = None;
                        }
                    }
                    state = next;
                }
            }
            phase.advance(drive.frequency, h);
            state.time = t + (s + 1) as f64 * h;
            if halted {
                break;
            }
        }
    }

    let duration = state.time;
    let displacement = state.position - start.position;
    let rms_error = if errors.is_empty() {
        None
    } else {
        let n = errors.len() as f64;
        let mut acc = [0.0; 3];
        for (_, e) in &errors {
            for i in 0..3 {
                acc[i] += e[i] * e[i];
            }
        }
        Some(acc.map(|a| libm::sqrt(a / n)))
    };
    let landing = events.iter().find_map(|(_, e)| match e {
        Event::Touchdown { outcome, .. } => Some(*outcome),
        _ => None,
    });
    let touchdown_speed = events.iter().find_map(|(_, e)| match e {
        Event::Touchdown { vertical_speed, .. } => Some(*vertical_speed),
        _ => None,
    });
    let horizontal = libm::hypot(displacement.x, displacement.y);
    Ok(RunSummary {
        name: sc.name.clone(),
        final_state: state,
        events,
        landing,
        touchdown_speed,
        rms_error,
        altitude_reached_at: reached,
        displacement,
        path_length: path,
        mean_speed: if duration > 0.0 { horizontal / duration } else { 0.0 },
        mean_yaw_rate: if duration > 0.0 { heading_change / duration } else { 0.0 },
        rectified_energy: energy.rectified_energy,
        signed_energy: energy.signed_energy,
        mean_power: energy.mean_power(),
        cost_of_transport: cost_of_transport(energy.rectified_energy, path, MIN_TRANSPORT_DISTANCE),
        saturation_count,
        duration,
        physics_step: h,
    })
}

/// Open-loop drive held for the whole run.
pub fn constant_drive(drive: DriveCommand) -> Control {
    Control::OpenLoop(alloc::vec![DriveKey { time: 0.0, drive }])
}

/// Open-loop ground run from rest.
pub fn ground_line(physics: &Physics, drive: DriveCommand, duration: f64) -> Scenario {
    let mut sc = Scenario::new("ground-line", Surface::Ground, constant_drive(drive), duration);
    sc.physics = physics.clone();
    sc
}

/// Open-loop water-surface run from rest.
pub fn water_line(physics: &Physics, drive: DriveCommand, duration: f64) -> Scenario {
    let mut sc = Scenario::new("water-line", Surface::Water, constant_drive(drive), duration);
    sc.physics = physics.clone();
    sc
}

/// Closed-loop run with the default controller.
pub fn closed_loop(name: &str, setpoints: Vec<SetpointKey>, duration: f64) -> Scenario {
    Scenario::new(
        name,
        Surface::Ground,
        Control::ClosedLoop(ClosedLoop {
            gains: ControllerGains::default(),
            limits: ControllerLimits::default(),
            frequency: FLIGHT_FREQUENCY,
            setpoints,
        }),
        duration,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepCell {
    pub amplitude: f64,
    pub frequency: f64,
    /// None in the lift-off regime.
    pub speed: Option<f64>,
    pub mean_power: f64,
    pub liftoff_regime: bool,
}

/// Whether thrust at this drive approaches the weight.
pub fn in_liftoff_regime(physics: &Physics, amplitude: f64, frequency: f64) -> bool {
    let d = DriveCommand::symmetric(frequency, amplitude, 0.0);
    let thrust = physics.wing_thrust(&d.left, frequency) + physics.wing_thrust(&d.right, frequency);
    thrust >= LIFTOFF_REGIME_THRUST_RATIO * physics.body.weight()
}

/// Ground speed over amplitude x frequency with a fixed second-harmonic ratio.
pub fn speed_sweep(
    physics: &Physics,
    amplitudes: &[f64],
    frequencies: &[f64],
    second_harmonic: f64,
    duration: f64,
) -> Result<Vec<SweepCell>> {
    let mut out = Vec::with_capacity(amplitudes.len() * frequencies.len());
    for &a in amplitudes {
        for &f in frequencies {
            let liftoff = in_liftoff_regime(physics, a, f);
            let (speed, power) = if liftoff {
                (None, 0.0)
            } else {
                let s = run(&ground_line(physics, DriveCommand::symmetric(f, a, second_harmonic), duration), &mut NullRecorder)?;
                (Some(s.mean_speed), s.mean_power)
            };
            out.push(SweepCell {
                amplitude: a,
                frequency: f,
                speed,
                mean_power: power,
                liftoff_regime: liftoff,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CotRow {
    pub label: &'static str,
    pub frequency: f64,
    pub speed: f64,
    pub mean_power: f64,
    pub cost_of_transport: CostOfTransport,
}

/// Ground cost of transport per frequency, plus a hover row.
pub fn cot_sweep(
    physics: &Physics,
    amplitude: f64,
    second_harmonic: f64,
    frequencies: &[f64],
    duration: f64,
) -> Result<Vec<CotRow>> {
    let mut out = Vec::new();
    for &f in frequencies {
        let s = run(&ground_line(physics, DriveCommand::symmetric(f, amplitude, second_harmonic), duration), &mut NullRecorder)?;
        out.push(CotRow {
            label: "ground",
            frequency: f,
            speed: s.mean_speed,
            mean_power: s.mean_power,
            cost_of_transport: s.cost_of_transport,
        });
    }
    out.push(CotRow {
        label: "hover",
        frequency: FLIGHT_FREQUENCY,
        speed: 0.0,
        mean_power: hover_power(physics),
        cost_of_transport: CostOfTransport::NotApplicable { distance: 0.0 },
    });
    Ok(out)
}

/// Mean electrical power at the trim hover drive (W).
pub fn hover_power(physics: &Physics) -> f64 {
    let mixer = Mixer::new(physics.body, physics.aero, physics.kinematics, FLIGHT_FREQUENCY);
    let d = DriveCommand::symmetric(FLIGHT_FREQUENCY, mixer.hover_amplitude(), 0.0);
    let l = physics.signal(&d.left, FLIGHT_FREQUENCY);
    let r = physics.signal(&d.right, FLIGHT_FREQUENCY);
    crate::energetics::trace_drive(&physics.electrical, &l, &r, 0.0, 50.0 * l.period()).mean_power()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Clearance {
    pub gap: f64,
    pub bounding_height: f64,
    /// Inclusive: a gap equal to the bounding height passes.
    pub passes: bool,
}

pub fn clearance_check(geometry: &RobotGeometry, gap: f64) -> Clearance {
    let h = geometry.bounding_height();
    Clearance {
        gap,
        bounding_height: h,
        passes: gap >= h,
    }
}

/// True when each value is at least the previous one.
pub fn is_nondecreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn setpoint_interpolation() {
        let keys = [
            SetpointKey {
                time: 1.0,
                setpoint: Setpoint::at(0.0, 0.0, 0.04),
            },
            SetpointKey {
                time: 3.0,
                setpoint: Setpoint::at(0.0, 0.0, 0.0),
            },
        ];
        assert_eq!(setpoint_at(&keys, 0.0).position.z, 0.04);
        assert_relative_eq!(setpoint_at(&keys, 2.0).position.z, 0.02, epsilon = 1e-15);
        assert_eq!(setpoint_at(&keys, 5.0).position.z, 0.0);
    }

    #[test]
    fn drive_schedule_is_piecewise_constant() {
        let a = DriveCommand::symmetric(60.0, 200.0, 0.3);
        let b = DriveCommand::symmetric(80.0, 210.0, 0.3);
        let keys = [DriveKey { time: 0.5, drive: a }, DriveKey { time: 1.0, drive: b }];
        assert_eq!(drive_at(&keys, 0.1), DriveCommand::default());
        assert_eq!(drive_at(&keys, 0.7), a);
        assert_eq!(drive_at(&keys, 1.0), b);
    }

    #[test]
    fn substeps_divide_the_control_period() {
        let sc = ground_line(&Physics::default(), DriveCommand::default(), 1.0);
        let (n, h) = sc.substeps();
        assert_relative_eq!(n as f64 * h, 1.0 / CONTROL_RATE, max_relative = 1e-14);
        assert!(h <= sc.dt);
    }

    #[test]
    fn violations_listed_together() {
        let mut sc = ground_line(&Physics::default(), DriveCommand::symmetric(60.0, 600.0, 0.3), 0.0);
        sc.dt = 1.0;
        let v = sc.violations();
        assert!(v.len() >= 3, "{v:?}");
    }

    #[test]
    fn water_without_flotation_rejected() {
        let mut sc = water_line(&Physics::water_variant(), DriveCommand::default(), 1.0);
        sc.physics.body.mass = 1e-3;
        assert!(sc.violations().iter().any(|v| v.starts_with("legs")));
    }

    #[test]
    fn clearance_boundaries() {
        let g = RobotGeometry::default();
        assert!(clearance_check(&g, 30e-3).passes);
        assert!(!clearance_check(&g, 0.0).passes);
        assert!(clearance_check(&g, g.bounding_height()).passes);
    }
}
