//! Motion-capture emulation: noisy, optionally delayed pose samples.

use alloc::collections::VecDeque;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::dynamics::RobotState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SensorConfig {
    /// Hz
    pub rate: f64,
    /// Standard deviation per axis (m).
    pub position_noise: f64,
    /// Standard deviation of the small-angle rotation per axis (rad).
    pub orientation_noise: f64,
    /// Delay in whole samples.
    pub latency_samples: usize,
    pub seed: u64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            rate: 240.0,
            position_noise: 1e-4,
            orientation_noise: 2e-3,
            latency_samples: 0,
            seed: 0,
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::param("sensor rate", "must be > 0"));
        }
        if !(self.position_noise >= 0.0) || !(self.orientation_noise >= 0.0) {
            return Err(Error::param("sensor noise", "must be >= 0"));
        }
        Ok(())
    }

    pub fn noiseless(mut self) -> Self {
        self.position_noise = 0.0;
        self.orientation_noise = 0.0;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoCapSample {
    pub timestamp: f64,
    pub position: Vector3<f64>,
    /// Unit quaternion, scalar first.
    pub orientation: [f64; 4],
}

impl MoCapSample {
    pub fn attitude(&self) -> UnitQuaternion<f64> {
        let [w, x, y, z] = self.orientation;
        UnitQuaternion::new_normalize(nalgebra::Quaternion::new(w, x, y, z))
    }
}

/// Rotation matrix of a scalar-first quaternion. The input is normalised first.
pub fn quaternion_to_rotation(q: [f64; 4]) -> Matrix3<f64> {
    let n = libm::sqrt(q.iter().map(|c| c * c).sum::<f64>());
    let [w, x, y, z] = q.map(|c| c / n);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    // sigma > 0 is checked by SensorConfig::validate
    Normal::new(0.0, sigma).map(|d| d.sample(rng)).unwrap_or(0.0)
}

/// One measurement of the true state, without latency.
pub fn sample(state: &RobotState, cfg: &SensorConfig, rng: &mut ChaCha8Rng) -> MoCapSample {
    let noise = Vector3::new(
        gaussian(rng, cfg.position_noise),
        gaussian(rng, cfg.position_noise),
        gaussian(rng, cfg.position_noise),
    );
    let rot = Vector3::new(
        gaussian(rng, cfg.orientation_noise),
        gaussian(rng, cfg.orientation_noise),
        gaussian(rng, cfg.orientation_noise),
    );
    let q = state.attitude * UnitQuaternion::from_scaled_axis(rot);
    let mut c = q.into_inner().coords;
    // canonical sign: non-negative scalar part
    if c.w < 0.0 {
        c = -c;
    }
    MoCapSample {
        timestamp: state.time,
        position: state.position + noise,
        orientation: [c.w, c.x, c.y, c.z],
    }
}

/// Seeded sensor with a latency buffer.
#[derive(Debug, Clone)]
pub struct MotionCapture {
    cfg: SensorConfig,
    rng: ChaCha8Rng,
    buffer: VecDeque<MoCapSample>,
}

impl MotionCapture {
    pub fn new(cfg: SensorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(MotionCapture {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            buffer: VecDeque::with_capacity(cfg.latency_samples + 1),
        })
    }

    pub fn config(&self) -> &SensorConfig {
        &self.cfg
    }

    /// Measures `state` and returns the sample taken `latency_samples` calls
    /// ago. Until the buffer fills, the oldest sample is repeated.
    pub fn measure(&mut self, state: &RobotState) -> MoCapSample {
        let s = sample(state, &self.cfg, &mut self.rng);
        self.buffer.push_back(s);
        while self.buffer.len() > self.cfg.latency_samples + 1 {
            self.buffer.pop_front();
        }
        self.buffer[0]
    }
}
