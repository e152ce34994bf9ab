//! Electrical power of capacitive actuators and cost of transport.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::waveform::DriveSignal;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ActuatorElectrical {
    /// Per actuator (F).
    pub capacitance: f64,
    /// Sampling rate of the power integral (Hz).
    pub sample_rate: f64,
}

impl Default for ActuatorElectrical {
    fn default() -> Self {
        ActuatorElectrical {
            capacitance: 1.0e-9,
            sample_rate: 1e4,
        }
    }
}

impl ActuatorElectrical {
    pub fn validate(&self) -> Result<()> {
        if !(self.capacitance > 0.0) {
            return Err(Error::param("capacitance", "must be > 0"));
        }
        if !(self.sample_rate > 0.0) {
            return Err(Error::param("sample_rate", "must be > 0"));
        }
        Ok(())
    }
}

/// `C dV/dt` (A).
pub fn actuator_current(elec: &ActuatorElectrical, signal: &DriveSignal, t: f64) -> f64 {
    elec.capacitance * signal.voltage_rate(t)
}

/// `V I`, with negative values zeroed when `rectified`.
pub fn instantaneous_power(voltage: f64, current: f64, rectified: bool) -> f64 {
    let p = voltage * current;
    if rectified {
        p.max(0.0)
    } else {
        p
    }
}

/// One power-log row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSample {
    pub time: f64,
    pub voltage_left: f64,
    pub current_left: f64,
    pub voltage_right: f64,
    pub current_right: f64,
    /// Sum over actuators, each clamped at zero.
    pub rectified: f64,
    pub signed: f64,
}

impl PowerSample {
    pub fn new(time: f64, v_l: f64, i_l: f64, v_r: f64, i_r: f64) -> Self {
        PowerSample {
            time,
            voltage_left: v_l,
            current_left: i_l,
            voltage_right: v_r,
            current_right: i_r,
            rectified: instantaneous_power(v_l, i_l, true) + instantaneous_power(v_r, i_r, true),
            signed: v_l * i_l + v_r * i_r,
        }
    }
}

/// Running trapezoidal energy integral of a power series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyTrace {
    first: Option<f64>,
    last: Option<PowerSample>,
    pub samples: usize,
    pub rectified_energy: f64,
    pub signed_energy: f64,
}

impl EnergyTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: PowerSample) {
        if let Some(prev) = self.last {
            let dt = s.time - prev.time;
            self.rectified_energy += 0.5 * (prev.rectified + s.rectified) * dt;
            self.signed_energy += 0.5 * (prev.signed + s.signed) * dt;
        } else {
            self.first = Some(s.time);
        }
        self.last = Some(s);
        self.samples += 1;
    }

    pub fn duration(&self) -> f64 {
        match (self.first, self.last) {
            (Some(a), Some(b)) => b.time - a,
            _ => 0.0,
        }
    }

    /// Mean rectified power (W).
    pub fn mean_power(&self) -> f64 {
        let d = self.duration();
        if d > 0.0 {
            self.rectified_energy / d
        } else {
            0.0
        }
    }
}

/// Samples the two drive signals over `[t0, t1]` at the configured rate.
pub fn trace_drive(
    elec: &ActuatorElectrical,
    left: &DriveSignal,
    right: &DriveSignal,
    t0: f64,
    t1: f64,
) -> EnergyTrace {
    let mut trace = EnergyTrace::new();
    let n = libm::ceil((t1 - t0) * elec.sample_rate).max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    for i in 0..=n {
        let t = t0 + h * i as f64;
        trace.push(PowerSample::new(
            t,
            left.voltage_at(t),
            actuator_current(elec, left, t),
            right.voltage_at(t),
            actuator_current(elec, right, t),
        ));
    }
    trace
}

/// Analytic mean rectified power of one actuator with `mu = 0`:
/// `C A omega V0 / pi` when the offset exceeds the amplitude.
pub fn sine_mean_power(elec: &ActuatorElectrical, signal: &DriveSignal) -> f64 {
    elec.capacitance * signal.amplitude * signal.omega() * signal.offset / core::f64::consts::PI
}

/// Path length of a polyline (m).
pub fn path_length(points: &[Vector3<f64>]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Minimum distance for a meaningful cost of transport (m).
pub const MIN_TRANSPORT_DISTANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum CostOfTransport {
    /// J/m
    Value { joules_per_meter: f64 },
    /// Distance below the threshold, as when hovering.
    NotApplicable { distance: f64 },
}

impl CostOfTransport {
    pub fn value(&self) -> Option<f64> {
        match self {
            CostOfTransport::Value { joules_per_meter } => Some(*joules_per_meter),
            CostOfTransport::NotApplicable { .. } => None,
        }
    }

    /// mJ/mm equals J/m.
    pub fn millijoules_per_millimeter(&self) -> Option<f64> {
        self.value()
    }
}

pub fn cost_of_transport(energy: f64, distance: f64, min_distance: f64) -> CostOfTransport {
    if !(distance >= min_distance) || distance <= 0.0 {
        CostOfTransport::NotApplicable { distance }
    } else {
        CostOfTransport::Value {
            joules_per_meter: energy / distance,
        }
    }
}

/// Least-squares fit `y = a + b x`; returns `(a, b, r^2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (a, b, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sig(a: f64, mu: f64, f: f64) -> DriveSignal {
        DriveSignal::new(350.0, a, mu, f).unwrap()
    }

    #[test]
    fn zero_current_at_peak() {
        let e = ActuatorElectrical::default();
        let s = sig(250.0, 0.0, 100.0);
        assert!(actuator_current(&e, &s, s.period() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn current_scales_with_frequency() {
        let e = ActuatorElectrical::default();
        let a = sig(250.0, 0.0, 50.0);
        let b = sig(250.0, 0.0, 100.0);
        assert_relative_eq!(actuator_current(&e, &b, 0.0), 2.0 * actuator_current(&e, &a, 0.0), max_relative = 1e-14);
    }

    #[test]
    fn rms_current_matches_finite_differences() {
        let e = ActuatorElectrical {
            capacitance: 5e-9,
            ..ActuatorElectrical::default()
        };
        let s = sig(210.0, 0.0, 60.0);
        let n = 20_000;
        let h = 1e-7;
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..n {
            let t = s.period() * i as f64 / n as f64;
            a += actuator_current(&e, &s, t).powi(2);
            let fd = e.capacitance * (s.voltage_at(t + h) - s.voltage_at(t - h)) / (2.0 * h);
            b += fd * fd;
        }
        assert_relative_eq!((a / n as f64).sqrt(), (b / n as f64).sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn zeroing_rule() {
        assert_eq!(instantaneous_power(100.0, -1e-3, true), 0.0);
        assert_eq!(instantaneous_power(100.0, -1e-3, false), -0.1);
    }

    #[test]
    fn mean_power_matches_closed_form() {
        let e = ActuatorElectrical::default();
        let s = sig(250.0, 0.0, 140.0);
        let tr = trace_drive(&e, &s, &s, 0.0, 10.0 * s.period());
        assert_relative_eq!(tr.mean_power(), 2.0 * sine_mean_power(&e, &s), max_relative = 1e-3);
        // signed energy of a periodic capacitive load integrates to zero
        assert!(tr.signed_energy.abs() < 1e-6 * tr.rectified_energy);
    }

    #[test]
    fn sample_rate_doubling() {
        let s = sig(250.0, 0.3, 120.0);
        let e1 = ActuatorElectrical::default();
        let e2 = ActuatorElectrical {
            sample_rate: 2e4,
            ..e1
        };
        let a = trace_drive(&e1, &s, &s, 0.0, 0.2).rectified_energy;
        let b = trace_drive(&e2, &s, &s, 0.0, 0.2).rectified_energy;
        assert!(((a - b) / b).abs() < 1e-3);
    }

    #[test]
    fn cot_examples() {
        assert_eq!(cost_of_transport(0.0, 1.0, 1e-4).value(), Some(0.0));
        assert_eq!(cost_of_transport(1.0, 1.0, 1e-4).value(), Some(1.0));
        assert!(cost_of_transport(1.0, 0.0, 1e-4).value().is_none());
    }

    #[test]
    fn path_length_of_square() {
        let p = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 1.0),
        ];
        assert_eq!(path_length(&p), 3.0);
    }

    #[test]
    fn fit_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (a, b, r2) = linear_fit(&xs, &ys);
        assert_relative_eq!(a, 1.0, epsilon = 1e-12);
        assert_relative_eq!(b, 2.0, epsilon = 1e-12);
        assert_relative_eq!(r2, 1.0, epsilon = 1e-12);
    }
}
