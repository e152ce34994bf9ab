//! Two-harmonic actuator drive and the voltage-to-stroke map.
//!
//! Each wing is driven by `V(t) = V0 + A0 sin(wt) + mu A0 sin(2wt)`. A nonzero
//! `mu` makes one half-stroke faster than the other, which is what turns the
//! symmetric quadratic drag into a net horizontal force.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::error::{Error, Result};

/// Second-harmonic ratios up to this magnitude are the usual operating range.
pub const TYPICAL_SECOND_HARMONIC: f64 = 0.3;
/// Ratios beyond this are rejected outright.
pub const MAX_SECOND_HARMONIC: f64 = 0.5;
/// Bias offset of the centre node, half of the 700 V rail.
pub const DEFAULT_OFFSET_VOLTAGE: f64 = 350.0;
/// Drive amplitude that produces the nominal 90 degree peak-to-peak stroke.
pub const NOMINAL_AMPLITUDE: f64 = 250.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriveSignal {
    /// Offset `V0` (V).
    pub offset: f64,
    /// Fundamental amplitude `A0` (V).
    pub amplitude: f64,
    /// Second-harmonic ratio `mu`, so that `A1 = mu A0`.
    pub second_harmonic: f64,
    /// Flapping frequency (Hz).
    pub frequency: f64,
}

impl DriveSignal {
    pub fn new(offset: f64, amplitude: f64, second_harmonic: f64, frequency: f64) -> Result<Self> {
        let s = DriveSignal {
            offset,
            amplitude,
            second_harmonic,
            frequency,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks the value invariants; the voltage envelope is checked separately.
    pub fn validate(&self) -> Result<()> {
        if !self.offset.is_finite() {
            return Err(Error::param("offset", "must be finite"));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::param("amplitude", "must be finite and >= 0"));
        }
        if !(self.frequency > 0.0) || !self.frequency.is_finite() {
            return Err(Error::param("frequency", "must be finite and > 0"));
        }
        if !(self.second_harmonic.abs() <= MAX_SECOND_HARMONIC) {
            return Err(Error::param(
                "second_harmonic",
                alloc::format!("|mu| = {} exceeds {}", self.second_harmonic.abs(), MAX_SECOND_HARMONIC),
            ));
        }
        Ok(())
    }

    /// `true` when `|mu|` is outside the usual +-0.3 range (accepted, but worth a warning).
    pub fn is_atypical(&self) -> bool {
        self.second_harmonic.abs() > TYPICAL_SECOND_HARMONIC
    }

    pub fn omega(&self) -> f64 {
        TAU * self.frequency
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    pub fn voltage_at(&self, t: f64) -> f64 {
        let wt = self.omega() * t;
        self.offset
            + self.amplitude * libm::sin(wt)
            + self.second_harmonic * self.amplitude * libm::sin(2.0 * wt)
    }

    /// Analytic `dV/dt`.
    pub fn voltage_rate(&self, t: f64) -> f64 {
        let w = self.omega();
        let wt = w * t;
        self.amplitude * w * (libm::cos(wt) + 2.0 * self.second_harmonic * libm::cos(2.0 * wt))
    }

    /// Minimum and maximum of `V(t)` over one period.
    pub fn voltage_range(&self) -> (f64, f64) {
        let (lo, hi) = shape_extrema(self.second_harmonic);
        (
            self.offset + self.amplitude * lo,
            self.offset + self.amplitude * hi,
        )
    }

    pub fn check_envelope(&self, envelope: &VoltageEnvelope) -> Result<()> {
        let (min, max) = self.voltage_range();
        // allow rounding at the boundary
        let slack = 1e-9 * envelope.max.abs().max(1.0);
        if min < envelope.min - slack || max > envelope.max + slack {
            return Err(Error::EnvelopeViolation {
                min,
                max,
                env_min: envelope.min,
                env_max: envelope.max,
            });
        }
        Ok(())
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        DriveSignal { amplitude, ..self }
    }

    pub fn with_second_harmonic(self, second_harmonic: f64) -> Self {
        DriveSignal {
            second_harmonic,
            ..self
        }
    }
}

/// Allowed actuator voltage range.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct VoltageEnvelope {
    pub min: f64,
    pub max: f64,
}

impl Default for VoltageEnvelope {
    fn default() -> Self {
        VoltageEnvelope { min: 0.0, max: 700.0 }
    }
}

impl VoltageEnvelope {
    /// Largest amplitude whose waveform stays inside the envelope for the
    /// given offset and second-harmonic ratio.
    pub fn max_amplitude(&self, offset: f64, second_harmonic: f64) -> f64 {
        let (lo, hi) = shape_extrema(second_harmonic);
        let up = (self.max - offset) / hi;
        let down = (offset - self.min) / -lo;
        up.min(down).max(0.0)
    }
}

/// Extrema of `sin(x) + mu sin(2x)` over a period.
pub fn shape_extrema(mu: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for theta in velocity_zeros(mu) {
        let v = libm::sin(theta) + mu * libm::sin(2.0 * theta);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Phases in `[0, 2 pi)` where `cos(x) + 2 mu cos(2x)` vanishes, sorted.
///
/// With `c = cos(x)` this is the quadratic `4 mu c^2 + c - 2 mu = 0`.
pub fn velocity_zeros(mu: f64) -> Vec<f64> {
    let mut cosines: Vec<f64> = Vec::with_capacity(2);
    if mu.abs() < 1e-300 {
        cosines.push(0.0);
    } else {
        let disc = libm::sqrt(1.0 + 32.0 * mu * mu);
        for root in [(-1.0 + disc) / (8.0 * mu), (-1.0 - disc) / (8.0 * mu)] {
            if root.abs() <= 1.0 + 1e-12 {
                cosines.push(root.clamp(-1.0, 1.0));
            }
        }
    }
    let mut out: Vec<f64> = Vec::with_capacity(4);
    for c in cosines {
        let a = libm::acos(c);
        out.push(a);
        out.push(TAU - a);
    }
    for x in out.iter_mut() {
        if *x >= TAU {
            *x -= TAU;
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if out.len() > 1 && (out[0] + TAU - out[out.len() - 1]).abs() < 1e-12 {
        out.pop();
    }
    out
}

/// Linear voltage-to-stroke map with hard saturation at the transmission stops.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct WingKinematicsMap {
    /// Stroke angle per volt of `V - V0` (rad/V).
    pub stroke_gain: f64,
    /// Peak-to-peak stroke limit (rad).
    pub max_stroke_amplitude: f64,
    /// Wing length (m).
    pub wing_length: f64,
    /// Mean chord (m).
    pub mean_chord: f64,
}

/// Fraction of the wing length at which the quasi-steady drag is applied.
pub const DRAG_RADIUS_FRACTION: f64 = 0.6;

impl Default for WingKinematicsMap {
    fn default() -> Self {
        WingKinematicsMap {
            // 250 V amplitude -> +-45 degrees
            stroke_gain: FRAC_PI_4 / NOMINAL_AMPLITUDE,
            max_stroke_amplitude: 100.0 * PI / 180.0,
            wing_length: 13e-3,
            mean_chord: 3.0e-3,
        }
    }
}

impl WingKinematicsMap {
    pub fn validate(&self) -> Result<()> {
        if !(self.stroke_gain > 0.0) {
            return Err(Error::param("stroke_gain", "must be > 0"));
        }
        if !(self.max_stroke_amplitude > 0.0) {
            return Err(Error::param("max_stroke_amplitude", "must be > 0"));
        }
        if !(self.wing_length > 0.0) || !(self.mean_chord >= 0.0) {
            return Err(Error::param("wing_length", "wing dimensions must be positive"));
        }
        Ok(())
    }

    pub fn characteristic_radius(&self) -> f64 {
        DRAG_RADIUS_FRACTION * self.wing_length
    }

    pub fn planform_area(&self) -> f64 {
        self.wing_length * self.mean_chord
    }

    fn half_limit(&self) -> f64 {
        0.5 * self.max_stroke_amplitude
    }

    fn raw_stroke(&self, signal: &DriveSignal, t: f64) -> f64 {
        self.stroke_gain * (signal.voltage_at(t) - signal.offset)
    }

    /// Stroke angle (rad); positive sweeps the wing toward the tail.
    pub fn stroke_angle(&self, signal: &DriveSignal, t: f64) -> f64 {
        let lim = self.half_limit();
        self.raw_stroke(signal, t).clamp(-lim, lim)
    }

    pub fn is_saturated(&self, signal: &DriveSignal, t: f64) -> bool {
        self.raw_stroke(signal, t).abs() >= self.half_limit()
    }

    /// Stroke angular rate (rad/s); zero while pinned against a stop.
    pub fn stroke_rate(&self, signal: &DriveSignal, t: f64) -> f64 {
        if self.is_saturated(signal, t) {
            0.0
        } else {
            self.stroke_gain * signal.voltage_rate(t)
        }
    }

    /// Linear speed of the wing at its characteristic radius (m/s).
    pub fn wing_tip_velocity(&self, signal: &DriveSignal, t: f64) -> f64 {
        self.stroke_rate(signal, t) * self.characteristic_radius()
    }

    /// Peak stroke `gain * A0 * max|shape|` before clipping.
    pub fn unclipped_peak(&self, signal: &DriveSignal) -> f64 {
        let (lo, hi) = shape_extrema(signal.second_harmonic);
        self.stroke_gain * signal.amplitude * hi.max(-lo)
    }

    pub fn clips(&self, signal: &DriveSignal) -> bool {
        self.unclipped_peak(signal) > self.half_limit()
    }

    /// Stroke phase boundaries in `[0, 2 pi)` where the unclipped stroke crosses a stop.
    pub(crate) fn clip_phases(&self, signal: &DriveSignal) -> Vec<f64> {
        let mut out = Vec::new();
        if !self.clips(signal) || signal.amplitude == 0.0 {
            return out;
        }
        let mu = signal.second_harmonic;
        let level = self.half_limit() / (self.stroke_gain * signal.amplitude);
        let shape = |x: f64| libm::sin(x) + mu * libm::sin(2.0 * x);
        // shape is monotone between consecutive velocity zeros
        let zeros = velocity_zeros(mu);
        let n = zeros.len();
        for i in 0..n {
            let a = zeros[i];
            let b = if i + 1 < n { zeros[i + 1] } else { zeros[0] + TAU };
            for target in [level, -level] {
                let g = |x: f64| shape(x) - target;
                let (ga, gb) = (g(a), g(b));
                if ga == 0.0 || gb == 0.0 || (ga < 0.0) != (gb < 0.0) {
                    let r = crate::quadrature::bisect(g, a, b);
                    out.push(if r >= TAU { r - TAU } else { r });
                }
            }
        }
        out
    }
}
