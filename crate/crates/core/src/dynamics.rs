//! Rigid-body motion in the three contact regimes.
//!
//! Airborne motion is 6-DOF and integrated with classical RK4. On the ground
//! and on water the body is level and planar (x, y, yaw) and integrated with
//! a semi-implicit first-order step, since Coulomb friction is discontinuous
//! anyway.

use nalgebra::{Quaternion, UnitQuaternion, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::hydrostatics::FlotationReport;
use crate::{FLIGHT_MASS, STANDARD_GRAVITY};

/// Largest physics step that still resolves a 140 Hz stroke with 35 samples.
pub const MAX_STEP: f64 = 2e-4;
pub const DEFAULT_STEP: f64 = 5e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Airborne,
    Ground,
    WaterSurface,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Airborne => "airborne",
            Mode::Ground => "ground",
            Mode::WaterSurface => "water",
        }
    }
}

/// What lies under the robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Surface {
    #[default]
    Ground,
    Water,
}

impl Surface {
    pub fn contact_mode(&self) -> Mode {
        match self {
            Surface::Ground => Mode::Ground,
            Surface::Water => Mode::WaterSurface,
        }
    }
}

/// Pose and twist. `z` is the height of the feet above the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub position: Vector3<f64>,
    /// World frame.
    pub velocity: Vector3<f64>,
    /// Body to world.
    pub attitude: UnitQuaternion<f64>,
    /// Body frame.
    pub body_rates: Vector3<f64>,
    pub mode: Mode,
    pub time: f64,
}

impl RobotState {
    pub fn at_rest(mode: Mode) -> Self {
        RobotState {
            position: Vector3::zeros(),
            velocity: Vector3::zeros(),
            attitude: UnitQuaternion::identity(),
            body_rates: Vector3::zeros(),
            mode,
            time: 0.0,
        }
    }

    /// Angle between the body and world vertical axes (rad).
    pub fn tilt(&self) -> f64 {
        let z = self.attitude * Vector3::z();
        libm::acos(z.z.clamp(-1.0, 1.0))
    }

    /// Heading of the body `x` axis projected onto the ground plane (rad).
    pub fn heading(&self) -> f64 {
        let x = self.attitude * Vector3::x();
        libm::atan2(x.y, x.x)
    }

    pub fn check_finite(&self) -> Result<()> {
        let fields: [(&'static str, bool); 4] = [
            ("position", self.position.iter().all(|v| v.is_finite())),
            ("velocity", self.velocity.iter().all(|v| v.is_finite())),
            ("attitude", self.attitude.coords.iter().all(|v| v.is_finite())),
            ("body rates", self.body_rates.iter().all(|v| v.is_finite())),
        ];
        for (field, ok) in fields {
            if !ok {
                return Err(Error::NonFinite { time: self.time, field });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BodyParams {
    /// kg
    pub mass: f64,
    /// Principal moments about body x (roll), y (pitch), z (yaw) (kg m^2).
    pub inertia: [f64; 3],
    /// Lateral distance from the centre of mass to each wing's aerodynamic centre (m).
    pub thrust_moment_arm: f64,
    /// Height of the aerodynamic centre above the centre of mass (m).
    pub aero_center_height: f64,
    pub gravity: f64,
    /// Constant yaw disturbance torque (N m).
    pub yaw_bias_torque: f64,
}

impl Default for BodyParams {
    fn default() -> Self {
        BodyParams {
            mass: FLIGHT_MASS,
            inertia: [1.5e-9, 1.5e-9, 1.0e-9],
            thrust_moment_arm: 6e-3,
            aero_center_height: 4e-3,
            gravity: STANDARD_GRAVITY,
            yaw_bias_torque: 0.0,
        }
    }
}

impl BodyParams {
    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(Error::param("mass", "must be > 0"));
        }
        if self.inertia.iter().any(|i| !(*i > 0.0)) {
            return Err(Error::param("inertia", "all moments must be > 0"));
        }
        if !(self.thrust_moment_arm > 0.0) || !(self.aero_center_height > 0.0) {
            return Err(Error::param("thrust_moment_arm", "moment arms must be > 0"));
        }
        if !(self.gravity > 0.0) {
            return Err(Error::param("gravity", "must be > 0"));
        }
        Ok(())
    }
}

/// Surface interaction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ContactParams {
    /// Single Coulomb coefficient, used for both sticking and sliding.
    pub friction_coefficient: f64,
    /// Effective radius of the foot contact patch for yaw friction (m).
    pub yaw_friction_radius: f64,
    /// Linear water drag on translation (N s/m).
    pub water_linear_drag: f64,
    /// Linear water drag on yaw (N m s/rad).
    pub water_yaw_drag: f64,
    /// Touchdowns with more tilt than this topple (deg).
    pub topple_tilt_deg: f64,
    /// Vertical touchdown speed that breaks the water film (m/s).
    pub film_break_speed: f64,
    /// Natural frequency of the post-touchdown rocking on water (Hz).
    pub water_settle_frequency: f64,
    pub water_settle_damping: f64,
    /// Static dimple depth under a loaded leg (m).
    pub dimple_depth: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        ContactParams {
            friction_coefficient: 0.6,
            yaw_friction_radius: 4e-3,
            water_linear_drag: crate::scenario::calibration::WATER_LINEAR_DRAG,
            water_yaw_drag: crate::scenario::calibration::WATER_YAW_DRAG,
            topple_tilt_deg: 30.0,
            film_break_speed: 0.3,
            water_settle_frequency: 10.0,
            water_settle_damping: 0.45,
            dimple_depth: 1.0e-3,
        }
    }
}

impl ContactParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.friction_coefficient >= 0.0) || !(self.yaw_friction_radius >= 0.0) {
            return Err(Error::param("friction_coefficient", "friction parameters must be >= 0"));
        }
        if !(self.water_linear_drag > 0.0) || !(self.water_yaw_drag > 0.0) {
            return Err(Error::param("water_linear_drag", "water drag coefficients must be > 0"));
        }
        if !(self.topple_tilt_deg > 0.0) || !(self.film_break_speed > 0.0) {
            return Err(Error::param("topple_tilt_deg", "touchdown thresholds must be > 0"));
        }
        if !(self.water_settle_frequency > 0.0) || !(self.water_settle_damping > 0.0) {
            return Err(Error::param("water_settle_frequency", "settling parameters must be > 0"));
        }
        Ok(())
    }
}

/// Force and torque in the body frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

/// Loads acting on a body constrained to a surface.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarLoad {
    /// Horizontal force along body x (N).
    pub force_x: f64,
    /// Horizontal force along body y (N).
    pub force_y: f64,
    /// About the vertical axis (N m).
    pub yaw_torque: f64,
    /// Vertical aerodynamic lift (N).
    pub lift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TouchdownOutcome {
    Upright,
    Toppled,
    /// Water touchdown that punched through the surface film or sank.
    FilmBroken,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Event {
    Touchdown {
        surface: Surface,
        outcome: TouchdownOutcome,
        vertical_speed: f64,
        tilt_deg: f64,
    },
    Liftoff,
    /// Lift exceeded weight on water, but the film holds the legs down.
    SurfaceBound { lift: f64, weight: f64 },
    /// 0 = front, 1 = middle, 2 = back.
    LegContact { leg: usize },
    WaterSettled,
}

#[derive(Clone, Copy)]
struct Deriv {
    dp: Vector3<f64>,
    dv: Vector3<f64>,
    dq: Quaternion<f64>,
    dw: Vector3<f64>,
}

fn rigid_body_rates(
    q: &Quaternion<f64>,
    v: &Vector3<f64>,
    w: &Vector3<f64>,
    wrench: &Wrench,
    params: &BodyParams,
) -> Deriv {
    let unit = UnitQuaternion::new_normalize(*q);
    let accel = (unit * wrench.force) / params.mass - Vector3::new(0.0, 0.0, params.gravity);
    let dq = q * Quaternion::new(0.0, w.x, w.y, w.z) * 0.5;
    let inertia = Vector3::from(params.inertia);
    let h = inertia.component_mul(w);
    let dw = (wrench.torque - w.cross(&h)).component_div(&inertia);
    Deriv {
        dp: *v,
        dv: accel,
        dq,
        dw,
    }
}

fn check_step(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::param("dt", alloc::format!("{dt} s outside (0, {MAX_STEP}]")));
    }
    Ok(())
}

/// One RK4 step of free 6-DOF motion under a body-frame wrench and gravity.
pub fn step(state: &RobotState, wrench: &Wrench, params: &BodyParams, dt: f64) -> Result<RobotState> {
    check_step(dt)?;
    let p0 = state.position;
    let v0 = state.velocity;
    let q0 = *state.attitude.quaternion();
    let w0 = state.body_rates;

    let k1 = rigid_body_rates(&q0, &v0, &w0, wrench, params);
    let h = 0.5 * dt;
    let k2 = rigid_body_rates(&(q0 + k1.dq * h), &(v0 + k1.dv * h), &(w0 + k1.dw * h), wrench, params);
    let k3 = rigid_body_rates(&(q0 + k2.dq * h), &(v0 + k2.dv * h), &(w0 + k2.dw * h), wrench, params);
    let k4 = rigid_body_rates(&(q0 + k3.dq * dt), &(v0 + k3.dv * dt), &(w0 + k3.dw * dt), wrench, params);

    let s = dt / 6.0;
    let next = RobotState {
        position: p0 + (k1.dp + k2.dp * 2.0 + k3.dp * 2.0 + k4.dp) * s,
        velocity: v0 + (k1.dv + k2.dv * 2.0 + k3.dv * 2.0 + k4.dv) * s,
        attitude: UnitQuaternion::new_normalize(q0 + (k1.dq + k2.dq * 2.0 + k3.dq * 2.0 + k4.dq) * s),
        body_rates: w0 + (k1.dw + k2.dw * 2.0 + k3.dw * 2.0 + k4.dw) * s,
        mode: state.mode,
        time: state.time + dt,
    };
    next.check_finite()?;
    Ok(next)
}

/// Coulomb update of a planar velocity. `friction` is the force magnitude `mu N`.
fn coulomb_2d(v: Vector2<f64>, force: Vector2<f64>, friction: f64, mass: f64, dt: f64) -> Vector2<f64> {
    let speed = v.norm();
    let drive = force.norm();
    if speed == 0.0 {
        if drive <= friction {
            return Vector2::zeros();
        }
        return (force - force * (friction / drive)) * (dt / mass);
    }
    let next = v + (force - v * (friction / speed)) * (dt / mass);
    if next.dot(&v) <= 0.0 {
        // came to rest within the step; restart from rest next step
        return Vector2::zeros();
    }
    next
}

fn coulomb_1d(w: f64, torque: f64, friction: f64, inertia: f64, dt: f64) -> f64 {
    coulomb_2d(Vector2::new(w, 0.0), Vector2::new(torque, 0.0), friction, inertia, dt).x
}

fn level_with_heading(heading: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::z_axis(), heading)
}

fn world_planar_force(heading: f64, load: &PlanarLoad) -> Vector2<f64> {
    let (s, c) = (libm::sin(heading), libm::cos(heading));
    Vector2::new(c * load.force_x - s * load.force_y, s * load.force_x + c * load.force_y)
}

/// One stick-slip step on the ground.
///
/// The body moves only while the horizontal load beats `mu (m g - lift)`;
/// yaw obeys the same law with threshold `mu (m g - lift) r_yaw`. When lift
/// exceeds weight the body is released into flight and `Event::Liftoff` is
/// returned.
pub fn ground_step(
    state: &RobotState,
    load: &PlanarLoad,
    params: &BodyParams,
    contact: &ContactParams,
    dt: f64,
) -> Result<(RobotState, Option<Event>)> {
    check_step(dt)?;
    let normal = params.weight() - load.lift;
    if normal <= 0.0 {
        let mut next = *state;
        next.mode = Mode::Airborne;
        next.velocity.z = 0.0;
        return Ok((next, Some(Event::Liftoff)));
    }
    let heading = state.heading();
    let friction = contact.friction_coefficient * normal;
    let v = Vector2::new(state.velocity.x, state.velocity.y);
    let v_next = coulomb_2d(v, world_planar_force(heading, load), friction, params.mass, dt);
    let yaw_rate = coulomb_1d(
        state.body_rates.z,
        load.yaw_torque,
        friction * contact.yaw_friction_radius,
        params.inertia[2],
        dt,
    );
    let heading_next = heading + yaw_rate * dt;
    let next = RobotState {
        position: Vector3::new(
            state.position.x + v_next.x * dt,
            state.position.y + v_next.y * dt,
            0.0,
        ),
        velocity: Vector3::new(v_next.x, v_next.y, 0.0),
        attitude: level_with_heading(heading_next),
        body_rates: Vector3::new(0.0, 0.0, yaw_rate),
        mode: Mode::Ground,
        time: state.time + dt,
    };
    next.check_finite()?;
    Ok((next, None))
}

/// One step of planar motion on the water surface with linear water drag.
///
/// Lift at or above the weight yields `Event::SurfaceBound`; the film keeps
/// the legs attached and the body stays on the surface.
pub fn water_step(
    state: &RobotState,
    load: &PlanarLoad,
    report: &FlotationReport,
    params: &BodyParams,
    contact: &ContactParams,
    dt: f64,
) -> Result<(RobotState, Option<Event>)> {
    check_step(dt)?;
    if !report.floats() {
        return Err(Error::param("legs", "flotation margin is not positive"));
    }
    let event = if load.lift >= params.weight() {
        Some(Event::SurfaceBound {
            lift: load.lift,
            weight: params.weight(),
        })
    } else {
        None
    };
    let heading = state.heading();
    let f = world_planar_force(heading, load);
    let m = params.mass;
    let damp = 1.0 + contact.water_linear_drag * dt / m;
    let vx = (state.velocity.x + f.x * dt / m) / damp;
    let vy = (state.velocity.y + f.y * dt / m) / damp;
    let iz = params.inertia[2];
    let wz = (state.body_rates.z + load.yaw_torque * dt / iz) / (1.0 + contact.water_yaw_drag * dt / iz);
    let next = RobotState {
        position: Vector3::new(state.position.x + vx * dt, state.position.y + vy * dt, 0.0),
        velocity: Vector3::new(vx, vy, 0.0),
        attitude: level_with_heading(heading + wz * dt),
        body_rates: Vector3::new(0.0, 0.0, wz),
        mode: Mode::WaterSurface,
        time: state.time + dt,
    };
    next.check_finite()?;
    Ok((next, event))
}

/// Mode change detected after an airborne step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub to: Mode,
    pub event: Event,
}

/// Checks for touchdown: feet at or below the surface while descending.
pub fn detect_mode_transition(
    state: &RobotState,
    contact: &ContactParams,
    surface: Surface,
    flotation: Option<&FlotationReport>,
) -> Option<Transition> {
    if state.mode != Mode::Airborne || state.position.z > 0.0 || state.velocity.z >= 0.0 {
        return None;
    }
    let tilt_deg = state.tilt().to_degrees();
    let vertical_speed = -state.velocity.z;
    let upright = tilt_deg < contact.topple_tilt_deg;
    let outcome = match surface {
        Surface::Ground => {
            if upright {
                TouchdownOutcome::Upright
            } else {
                TouchdownOutcome::Toppled
            }
        }
        Surface::Water => {
            let floats = flotation.map(|r| r.floats()).unwrap_or(false);
            if !floats || vertical_speed >= contact.film_break_speed {
                TouchdownOutcome::FilmBroken
            } else if upright {
                TouchdownOutcome::Upright
            } else {
                TouchdownOutcome::Toppled
            }
        }
    };
    Some(Transition {
        to: surface.contact_mode(),
        event: Event::Touchdown {
            surface,
            outcome,
            vertical_speed,
            tilt_deg,
        },
    })
}

/// Puts an airborne state onto the surface: feet at zero height, vertical
/// motion removed, roll and pitch kept for the caller to settle.
pub fn touch_down(state: &RobotState, surface: Surface) -> RobotState {
    let mut next = *state;
    next.mode = surface.contact_mode();
    next.position.z = 0.0;
    next.velocity.z = 0.0;
    if surface == Surface::Ground {
        next.attitude = level_with_heading(state.heading());
        next.body_rates = Vector3::zeros();
    }
    next
}

/// Rocking of the body after a water touchdown, reduced to a damped
/// oscillation of roll and pitch about level.
///
/// Legs sit at body x = +s, 0, -s. A leg is in contact once its height above
/// the surface, measured from the first leg down, is within the dimple depth.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterSettle {
    /// Roll, pitch (rad).
    tilt: Vector2<f64>,
    rate: Vector2<f64>,
    elapsed: f64,
    leg_offsets: [f64; 3],
    contact: [bool; 3],
    settled: bool,
}

/// Tilt below which the body counts as level.
const SETTLED_TILT: f64 = 0.5 * core::f64::consts::PI / 180.0;
const SETTLED_RATE: f64 = 5.0 * core::f64::consts::PI / 180.0;

impl WaterSettle {
    pub fn new(state: &RobotState, leg_spacing: f64) -> Self {
        let (roll, pitch, _) = state.attitude.euler_angles();
        WaterSettle {
            tilt: Vector2::new(roll, pitch),
            rate: Vector2::new(state.body_rates.x, state.body_rates.y),
            elapsed: 0.0,
            leg_offsets: [leg_spacing, 0.0, -leg_spacing],
            contact: [false; 3],
            settled: false,
        }
    }

    pub fn is_settled(&self) -> bool {
        self.settled
    }

    /// Height of each leg above the lowest one (m).
    fn leg_heights(&self) -> [f64; 3] {
        // positive pitch lowers the front leg
        let drop = self.leg_offsets.map(|x| x * libm::sin(self.tilt.y));
        let lowest = drop.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        drop.map(|d| lowest - d)
    }

    /// Advances the rocking and returns events in the order they occur.
    pub fn step(&mut self, contact: &ContactParams, dt: f64) -> alloc::vec::Vec<Event> {
        let mut events = alloc::vec::Vec::new();
        if self.settled {
            return events;
        }
        let wn = core::f64::consts::TAU * contact.water_settle_frequency;
        let zeta = contact.water_settle_damping;
        // semi-implicit oscillator
        let acc = -self.tilt * (wn * wn) - self.rate * (2.0 * zeta * wn);
        self.rate += acc * dt;
        self.tilt += self.rate * dt;
        self.elapsed += dt;

        let tau = 1.0 / (zeta * wn);
        let dimple = contact.dimple_depth * (1.0 - libm::exp(-self.elapsed / tau));
        let heights = self.leg_heights();
        let mut order: [usize; 3] = [0, 1, 2];
        // lowest first; ties front to back
        order.sort_by(|a, b| heights[*a].total_cmp(&heights[*b]).then(a.cmp(b)));
        for leg in order {
            if !self.contact[leg] && heights[leg] <= dimple {
                self.contact[leg] = true;
                events.push(Event::LegContact { leg });
            }
        }
        if self.contact.iter().all(|c| *c)
            && self.tilt.norm() < SETTLED_TILT
            && self.rate.norm() < SETTLED_RATE
        {
            self.settled = true;
            events.push(Event::WaterSettled);
        }
        events
    }

    /// Applies the current rocking attitude to a surface state.
    pub fn apply(&self, state: &mut RobotState) {
        let level = level_with_heading(state.heading());
        let tilt = UnitQuaternion::from_euler_angles(self.tilt.x, self.tilt.y, 0.0);
        state.attitude = level * tilt;
        state.body_rates.x = self.rate.x;
        state.body_rates.y = self.rate.y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> BodyParams {
        BodyParams::default()
    }

    #[test]
    fn free_fall_one_step() {
        let p = params();
        let s = RobotState::at_rest(Mode::Airborne);
        let dt = 1e-4;
        let n = step(&s, &Wrench::default(), &p, dt).unwrap();
        assert_relative_eq!(n.position.z, -0.5 * p.gravity * dt * dt, max_relative = 1e-12);
    }

    #[test]
    fn hover_balance() {
        let p = params();
        let mut s = RobotState::at_rest(Mode::Airborne);
        s.velocity = Vector3::new(0.1, -0.2, 0.05);
        let w = Wrench {
            force: Vector3::new(0.0, 0.0, p.weight()),
            torque: Vector3::zeros(),
        };
        let mut cur = s;
        for _ in 0..1000 {
            cur = step(&cur, &w, &p, 5e-5).unwrap();
        }
        assert!((cur.velocity - s.velocity).norm() < 1e-12);
    }

    #[test]
    fn constant_roll_torque() {
        let p = params();
        let s = RobotState::at_rest(Mode::Airborne);
        let tau = 2e-9;
        let w = Wrench {
            force: Vector3::new(0.0, 0.0, p.weight()),
            torque: Vector3::new(tau, 0.0, 0.0),
        };
        let mut cur = s;
        for _ in 0..100 {
            cur = step(&cur, &w, &p, 1e-4).unwrap();
        }
        assert_relative_eq!(cur.body_rates.x, tau / p.inertia[0] * 0.01, max_relative = 1e-9);
    }

    #[test]
    fn rejects_bad_step() {
        let p = params();
        let s = RobotState::at_rest(Mode::Airborne);
        assert!(step(&s, &Wrench::default(), &p, 0.0).is_err());
        assert!(step(&s, &Wrench::default(), &p, 3e-4).is_err());
    }

    #[test]
    fn non_finite_aborts() {
        let p = params();
        let s = RobotState::at_rest(Mode::Airborne);
        let w = Wrench {
            force: Vector3::new(f64::NAN, 0.0, 0.0),
            torque: Vector3::zeros(),
        };
        assert!(matches!(step(&s, &w, &p, 1e-4), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn ballistic_energy_conserved() {
        let p = params();
        let mut s = RobotState::at_rest(Mode::Airborne);
        s.velocity = Vector3::new(0.3, 0.1, 2.0);
        s.position.z = 0.5;
        s.body_rates = Vector3::new(3.0, -2.0, 1.0);
        let energy = |s: &RobotState| {
            let i = Vector3::from(p.inertia);
            0.5 * p.mass * s.velocity.norm_squared()
                + p.mass * p.gravity * s.position.z
                + 0.5 * s.body_rates.component_mul(&s.body_rates).dot(&i)
        };
        let e0 = energy(&s);
        let mut cur = s;
        for _ in 0..10_000 {
            cur = step(&cur, &Wrench::default(), &p, 1e-4).unwrap();
            let r = cur.attitude.to_rotation_matrix();
            let err = (r.matrix().transpose() * r.matrix() - nalgebra::Matrix3::identity()).norm();
            assert!(err < 1e-9);
        }
        assert!(((energy(&cur) - e0) / e0).abs() < 1e-3);
    }

    #[test]
    fn ground_sticks_below_threshold() {
        let p = params();
        let c = ContactParams::default();
        let thr = c.friction_coefficient * p.weight();
        let mut s = RobotState::at_rest(Mode::Ground);
        for i in 0..1000 {
            let load = PlanarLoad {
                force_x: 0.99 * thr * ((i as f64) * 0.1).sin(),
                ..PlanarLoad::default()
            };
            s = ground_step(&s, &load, &p, &c, 5e-5).unwrap().0;
        }
        assert_eq!(s.position, Vector3::zeros());
    }

    #[test]
    fn ground_slips_above_threshold_then_stops() {
        let p = params();
        let c = ContactParams::default();
        let thr = c.friction_coefficient * p.weight();
        let mut s = RobotState::at_rest(Mode::Ground);
        let push = PlanarLoad {
            force_x: 1.5 * thr,
            ..PlanarLoad::default()
        };
        for _ in 0..100 {
            s = ground_step(&s, &push, &p, &c, 5e-5).unwrap().0;
        }
        assert!(s.velocity.x > 0.0);
        let x_after_push = s.position.x;
        for _ in 0..10_000 {
            s = ground_step(&s, &PlanarLoad::default(), &p, &c, 5e-5).unwrap().0;
        }
        assert_eq!(s.velocity.x, 0.0);
        assert!(s.position.x > x_after_push);
    }

    #[test]
    fn ground_liftoff_when_lift_exceeds_weight() {
        let p = params();
        let c = ContactParams::default();
        let s = RobotState::at_rest(Mode::Ground);
        let load = PlanarLoad {
            lift: 1.01 * p.weight(),
            ..PlanarLoad::default()
        };
        let (n, e) = ground_step(&s, &load, &p, &c, 5e-5).unwrap();
        assert_eq!(n.mode, Mode::Airborne);
        assert_eq!(e, Some(Event::Liftoff));
    }

    fn floating_report() -> FlotationReport {
        crate::hydrostatics::flotation_check(
            &crate::hydrostatics::LegGeometry::default(),
            &crate::hydrostatics::WaterProperties::default(),
            95e-6,
        )
    }

    #[test]
    fn water_terminal_speed_is_force_over_drag() {
        let p = BodyParams {
            mass: 95e-6,
            ..params()
        };
        let c = ContactParams::default();
        let r = floating_report();
        let mut s = RobotState::at_rest(Mode::WaterSurface);
        let load = PlanarLoad {
            force_x: 1e-6,
            ..PlanarLoad::default()
        };
        for _ in 0..200_000 {
            s = water_step(&s, &load, &r, &p, &c, 5e-5).unwrap().0;
        }
        assert_relative_eq!(s.velocity.x, 1e-6 / c.water_linear_drag, max_relative = 1e-6);
    }

    #[test]
    fn water_lift_is_surface_bound() {
        let p = params();
        let c = ContactParams::default();
        let r = floating_report();
        let s = RobotState::at_rest(Mode::WaterSurface);
        let load = PlanarLoad {
            lift: 2.0 * p.weight(),
            ..PlanarLoad::default()
        };
        let (n, e) = water_step(&s, &load, &r, &p, &c, 5e-5).unwrap();
        assert_eq!(n.mode, Mode::WaterSurface);
        assert!(matches!(e, Some(Event::SurfaceBound { .. })));
    }

    #[test]
    fn sinking_legs_rejected() {
        let p = params();
        let c = ContactParams::default();
        let r = crate::hydrostatics::flotation_check(
            &crate::hydrostatics::LegGeometry::default(),
            &crate::hydrostatics::WaterProperties::default(),
            1e-3,
        );
        let s = RobotState::at_rest(Mode::WaterSurface);
        assert!(water_step(&s, &PlanarLoad::default(), &r, &p, &c, 5e-5).is_err());
    }

    fn descending(tilt_deg: f64, speed: f64) -> RobotState {
        let mut s = RobotState::at_rest(Mode::Airborne);
        s.position.z = -1e-6;
        s.velocity.z = -speed;
        s.attitude = UnitQuaternion::from_euler_angles(tilt_deg.to_radians(), 0.0, 0.0);
        s
    }

    #[test]
    fn touchdown_outcomes() {
        let c = ContactParams::default();
        let t = detect_mode_transition(&descending(0.0, 0.05), &c, Surface::Ground, None).unwrap();
        assert!(matches!(
            t.event,
            Event::Touchdown {
                outcome: TouchdownOutcome::Upright,
                ..
            }
        ));
        let t = detect_mode_transition(&descending(40.0, 0.05), &c, Surface::Ground, None).unwrap();
        assert!(matches!(
            t.event,
            Event::Touchdown {
                outcome: TouchdownOutcome::Toppled,
                ..
            }
        ));
        let mut rising = descending(0.0, 0.05);
        rising.velocity.z = 0.1;
        assert!(detect_mode_transition(&rising, &c, Surface::Ground, None).is_none());

        let r = floating_report();
        let soft = detect_mode_transition(&descending(5.0, 0.1), &c, Surface::Water, Some(&r)).unwrap();
        assert_eq!(soft.to, Mode::WaterSurface);
        assert!(matches!(
            soft.event,
            Event::Touchdown {
                outcome: TouchdownOutcome::Upright,
                ..
            }
        ));
        let hard = detect_mode_transition(&descending(0.0, 0.5), &c, Surface::Water, Some(&r)).unwrap();
        assert!(matches!(
            hard.event,
            Event::Touchdown {
                outcome: TouchdownOutcome::FilmBroken,
                ..
            }
        ));
    }

    #[test]
    fn water_settle_staged_contacts() {
        let c = ContactParams::default();
        let mut s = RobotState::at_rest(Mode::WaterSurface);
        s.attitude = UnitQuaternion::from_euler_angles(0.0, 12f64.to_radians(), 0.0);
        let mut settle = WaterSettle::new(&s, 15e-3);
        let mut log = std::vec::Vec::new();
        let dt = 5e-5;
        for i in 0..20_000 {
            for e in settle.step(&c, dt) {
                log.push((i as f64 * dt, e));
            }
        }
        let legs: std::vec::Vec<usize> = log
            .iter()
            .filter_map(|(_, e)| match e {
                Event::LegContact { leg } => Some(*leg),
                _ => None,
            })
            .collect();
        assert_eq!(legs, std::vec![0, 1, 2]);
        let first = log[0].0;
        let settled = log.iter().find(|(_, e)| *e == Event::WaterSettled).unwrap().0;
        assert!(first < 1e-3);
        assert!(settled > 0.05 && settled < 0.4, "{settled}");
        assert!(settle.is_settled());
    }
}
