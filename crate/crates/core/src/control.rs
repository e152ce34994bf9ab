//! Cascaded flight controller: altitude PID, lateral PD to a thrust-vector
//! inclination target, attitude PID on the body-frame inclination error,
//! and a mixer from normalised commands to per-wing drive parameters.

use nalgebra::{Matrix2, Matrix3, UnitQuaternion, Vector2, Vector3};

use crate::aero::{horizontal_force_slope, AeroParams};
use crate::dynamics::BodyParams;
use crate::error::{Error, Result};
use crate::filter::{Butterworth2, FilteredDerivative};
use crate::sensors::MoCapSample;
use crate::waveform::{VoltageEnvelope, WingKinematicsMap, DEFAULT_OFFSET_VOLTAGE, TYPICAL_SECOND_HARMONIC};

pub const CONTROL_RATE: f64 = 240.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ControllerGains {
    pub k_ph: f64,
    pub k_dh: f64,
    pub k_ih: f64,
    pub k_pl: f64,
    pub k_dl: f64,
    pub k_pa: f64,
    pub k_da: f64,
    pub k_ia: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        ControllerGains {
            k_ph: 40.0,
            k_dh: 12.0,
            k_ih: 20.0,
            k_pl: 2.0,
            k_dl: 0.9,
            k_pa: 1600.0,
            k_da: 56.0,
            k_ia: 50.0,
        }
    }
}

impl ControllerGains {
    pub fn zero() -> Self {
        ControllerGains {
            k_ph: 0.0,
            k_dh: 0.0,
            k_ih: 0.0,
            k_pl: 0.0,
            k_dl: 0.0,
            k_pa: 0.0,
            k_da: 0.0,
            k_ia: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.k_ph, self.k_dh, self.k_ih, self.k_pl, self.k_dl, self.k_pa, self.k_da, self.k_ia,
        ];
        if all.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
            return Err(Error::param("gains", "all gains must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Saturation and filtering settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ControllerLimits {
    /// m s
    pub altitude_integral: f64,
    /// s
    pub attitude_integral: f64,
    /// Norm bound on the commanded inclination.
    pub max_inclination: f64,
    /// Bound on the per-wing second-harmonic ratio used for pitch.
    pub max_second_harmonic: f64,
    /// Hz
    pub filter_cutoff: f64,
}

impl Default for ControllerLimits {
    fn default() -> Self {
        ControllerLimits {
            altitude_integral: 0.05,
            attitude_integral: 0.1,
            max_inclination: 0.3,
            max_second_harmonic: TYPICAL_SECOND_HARMONIC,
            filter_cutoff: 20.0,
        }
    }
}

impl ControllerLimits {
    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_integral >= 0.0) || !(self.attitude_integral >= 0.0) {
            return Err(Error::param("integral limits", "must be >= 0"));
        }
        if !(self.max_inclination > 0.0 && self.max_inclination < 1.0) {
            return Err(Error::param("max_inclination", "must lie in (0, 1)"));
        }
        if !(self.max_second_harmonic >= 0.0 && self.max_second_harmonic <= crate::waveform::MAX_SECOND_HARMONIC) {
            return Err(Error::param("max_second_harmonic", "must lie in [0, 0.5]"));
        }
        if !(self.filter_cutoff > 0.0 && self.filter_cutoff < 0.5 * CONTROL_RATE) {
            return Err(Error::param("filter_cutoff", "must lie below the Nyquist rate"));
        }
        Ok(())
    }
}

/// Reference position and lateral velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Setpoint {
    pub position: Vector3<f64>,
    pub velocity: Vector2<f64>,
}

impl Setpoint {
    pub fn at(x: f64, y: f64, z: f64) -> Self {
        Setpoint {
            position: Vector3::new(x, y, z),
            velocity: Vector2::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().chain(self.velocity.iter()).all(|v| v.is_finite())
    }
}

/// Integrators and filter memory.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub altitude_integral: f64,
    pub attitude_integral: Vector2<f64>,
    last_altitude_error: Option<f64>,
    last_attitude_error: Option<Vector2<f64>>,
    z: FilteredDerivative,
    x: FilteredDerivative,
    y: FilteredDerivative,
    rate_x: Butterworth2,
    rate_y: Butterworth2,
    last_attitude: Option<UnitQuaternion<f64>>,
    pub last_tick: Option<f64>,
    limits: ControllerLimits,
}

impl ControllerState {
    pub fn new(limits: ControllerLimits) -> Self {
        let c = limits.filter_cutoff;
        ControllerState {
            altitude_integral: 0.0,
            attitude_integral: Vector2::zeros(),
            last_altitude_error: None,
            last_attitude_error: None,
            z: FilteredDerivative::new(c, CONTROL_RATE),
            x: FilteredDerivative::new(c, CONTROL_RATE),
            y: FilteredDerivative::new(c, CONTROL_RATE),
            rate_x: Butterworth2::new(c, CONTROL_RATE),
            rate_y: Butterworth2::new(c, CONTROL_RATE),
            last_attitude: None,
            last_tick: None,
            limits,
        }
    }

    pub fn limits(&self) -> &ControllerLimits {
        &self.limits
    }
}

/// Altitude PID. The error derivative uses the filtered height derivative.
pub fn altitude_law(gains: &ControllerGains, state: &mut ControllerState, z: f64, z_d: f64, dt: f64) -> f64 {
    let (_, z_rate) = state.z.update(z);
    let e = z_d - z;
    // trapezoid over the interval since the previous tick
    if let Some(prev) = state.last_altitude_error {
        let bound = state.limits.altitude_integral;
        state.altitude_integral = (state.altitude_integral + 0.5 * (prev + e) * dt).clamp(-bound, bound);
    }
    state.last_altitude_error = Some(e);
    gains.k_ph * e - gains.k_dh * z_rate + gains.k_ih * state.altitude_integral
}

/// Lateral PD in the world frame giving the desired inclination of the body
/// z axis, norm-clamped to `max_inclination`.
pub fn lateral_law(
    gains: &ControllerGains,
    position: Vector2<f64>,
    velocity: Vector2<f64>,
    setpoint: &Setpoint,
    max_inclination: f64,
) -> Vector2<f64> {
    let e = setpoint.position.xy() - position;
    let de = setpoint.velocity - velocity;
    let z_d = e * gains.k_pl + de * gains.k_dl;
    let n = z_d.norm();
    if n > max_inclination {
        z_d * (max_inclination / n)
    } else {
        z_d
    }
}

/// Horizontal projection of the body z axis.
pub fn inclination(r: &Matrix3<f64>) -> Vector2<f64> {
    Vector2::new(r[(0, 2)], r[(1, 2)])
}

/// `R2^T (z_d - z)` with `R2` the upper-left block of `r`.
pub fn attitude_error_to_body(r: &Matrix3<f64>, z_hat: Vector2<f64>, z_d: Vector2<f64>) -> Vector2<f64> {
    let r2: Matrix2<f64> = r.fixed_view::<2, 2>(0, 0).into_owned();
    r2.transpose() * (z_d - z_hat)
}

/// Attitude PID. Returns normalised torques `(tau_x, tau_y)` in rad/s^2.
///
/// Roll responds to the negated y error and pitch to the x error.
pub fn attitude_law(
    gains: &ControllerGains,
    state: &mut ControllerState,
    error: Vector2<f64>,
    rates: Vector2<f64>,
    dt: f64,
) -> (f64, f64) {
    let drive = Vector2::new(-error.y, error.x);
    if let Some(prev) = state.last_attitude_error {
        let bound = state.limits.attitude_integral;
        let i = state.attitude_integral + (prev + drive) * (0.5 * dt);
        state.attitude_integral = i.map(|v| v.clamp(-bound, bound));
    }
    state.last_attitude_error = Some(drive);
    let tau = drive * gains.k_pa - rates * gains.k_da + state.attitude_integral * gains.k_ia;
    (tau.x, tau.y)
}

/// Drive parameters of one wing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct WingCommand {
    /// V
    pub amplitude: f64,
    pub second_harmonic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MixerOutput {
    pub left: WingCommand,
    pub right: WingCommand,
    pub saturated: bool,
}

/// Maps `(a_z, tau_x, tau_y)` to per-wing amplitudes and second-harmonic ratios.
///
/// Left is the +y side. Thrust is linear in amplitude; roll comes from the
/// thrust difference across `thrust_moment_arm`; pitch from the rectified
/// drag force of both wings acting at `aero_center_height`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixer {
    pub body: BodyParams,
    pub aero: AeroParams,
    pub map: WingKinematicsMap,
    pub envelope: VoltageEnvelope,
    pub offset: f64,
    pub frequency: f64,
    pub max_second_harmonic: f64,
}

impl Mixer {
    pub fn new(body: BodyParams, aero: AeroParams, map: WingKinematicsMap, frequency: f64) -> Self {
        Mixer {
            body,
            aero,
            map,
            envelope: VoltageEnvelope::default(),
            offset: DEFAULT_OFFSET_VOLTAGE,
            frequency,
            max_second_harmonic: TYPICAL_SECOND_HARMONIC,
        }
    }

    /// Thrust of one wing per volt of amplitude (N/V).
    pub fn wing_thrust_gain(&self) -> f64 {
        0.5 * self.aero.thrust_per_volt * self.aero.frequency_weight(self.frequency)
    }

    pub fn hover_amplitude(&self) -> f64 {
        0.5 * self.body.weight() / self.wing_thrust_gain()
    }

    pub fn mix(&self, a_z: f64, tau_x: f64, tau_y: f64) -> MixerOutput {
        let mut saturated = false;
        let mut thrust = self.body.mass * (self.body.gravity + a_z);
        if thrust < 0.0 {
            thrust = 0.0;
            saturated = true;
        }
        let roll = self.body.inertia[0] * tau_x / self.body.thrust_moment_arm;
        let gain = self.wing_thrust_gain();
        let left = 0.5 * (thrust + roll) / gain;
        let right = 0.5 * (thrust - roll) / gain;

        let slope = horizontal_force_slope(left.max(0.0), self.frequency, &self.map, &self.aero)
            + horizontal_force_slope(right.max(0.0), self.frequency, &self.map, &self.aero);
        let pitch_force = self.body.inertia[1] * tau_y / self.body.aero_center_height;
        let mut mu = if slope > 0.0 { pitch_force / slope } else { 0.0 };
        if mu.abs() > self.max_second_harmonic {
            mu = mu.clamp(-self.max_second_harmonic, self.max_second_harmonic);
            saturated = true;
        }
        let cap = self.envelope.max_amplitude(self.offset, mu);
        let mut clamp = |a: f64| {
            if a < 0.0 || a > cap {
                saturated = true;
            }
            a.clamp(0.0, cap)
        };
        let left = clamp(left);
        let right = clamp(right);
        MixerOutput {
            left: WingCommand {
                amplitude: left,
                second_harmonic: mu,
            },
            right: WingCommand {
                amplitude: right,
                second_harmonic: mu,
            },
            saturated,
        }
    }

    /// Total thrust and normalised roll torque produced by a pair of amplitudes.
    pub fn forward(&self, left: f64, right: f64) -> (f64, f64) {
        let gain = self.wing_thrust_gain();
        let thrust = gain * (left + right);
        let tau_x = self.body.thrust_moment_arm * gain * (left - right) / self.body.inertia[0];
        (thrust, tau_x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlOutput {
    pub a_z: f64,
    pub tau_x: f64,
    pub tau_y: f64,
    pub inclination_target: Vector2<f64>,
    pub left: WingCommand,
    pub right: WingCommand,
    pub saturated: bool,
}

/// The full cascade fed by motion-capture samples.
#[derive(Debug, Clone)]
pub struct Controller {
    pub gains: ControllerGains,
    pub mixer: Mixer,
    pub state: ControllerState,
    period: f64,
}

impl Controller {
    pub fn new(gains: ControllerGains, limits: ControllerLimits, mixer: Mixer) -> Result<Self> {
        gains.validate()?;
        limits.validate()?;
        Ok(Controller {
            gains,
            mixer,
            state: ControllerState::new(limits),
            period: 1.0 / CONTROL_RATE,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Body roll and pitch rates from consecutive attitudes, low-pass filtered.
    fn body_rates(&mut self, q: UnitQuaternion<f64>) -> Vector2<f64> {
        let raw = match self.state.last_attitude {
            Some(prev) => (prev.inverse() * q).scaled_axis() / self.period,
            None => Vector3::zeros(),
        };
        self.state.last_attitude = Some(q);
        Vector2::new(self.state.rate_x.filter(raw.x), self.state.rate_y.filter(raw.y))
    }

    pub fn update(&mut self, sample: &MoCapSample, setpoint: &Setpoint) -> ControlOutput {
        let dt = self.period;
        let q = sample.attitude();
        let r = crate::sensors::quaternion_to_rotation(sample.orientation);
        let a_z = altitude_law(&self.gains, &mut self.state, sample.position.z, setpoint.position.z, dt);
        let (x, vx) = self.state.x.update(sample.position.x);
        let (y, vy) = self.state.y.update(sample.position.y);
        let z_d = lateral_law(
            &self.gains,
            Vector2::new(x, y),
            Vector2::new(vx, vy),
            setpoint,
            self.state.limits.max_inclination,
        );
        let error = attitude_error_to_body(&r, inclination(&r), z_d);
        let rates = self.body_rates(q);
        let (tau_x, tau_y) = attitude_law(&self.gains, &mut self.state, error, rates, dt);
        self.state.last_tick = Some(sample.timestamp);
        let mix = self.mixer.mix(a_z, tau_x, tau_y);
        ControlOutput {
            a_z,
            tau_x,
            tau_y,
            inclination_target: z_d,
            left: mix.left,
            right: mix.right,
            saturated: mix.saturated,
        }
    }
}
