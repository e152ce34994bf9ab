//! Second-order Butterworth low-pass and a filtered derivative built on it.

use core::f64::consts::{PI, SQRT_2};

/// Direct-form I biquad designed by the bilinear transform with pre-warping.
#[derive(Debug, Clone, PartialEq)]
pub struct Butterworth2 {
    b: [f64; 3],
    a: [f64; 2],
    x: [f64; 2],
    y: [f64; 2],
    primed: bool,
}

impl Butterworth2 {
    pub fn new(cutoff_hz: f64, sample_hz: f64) -> Self {
        let k = libm::tan(PI * cutoff_hz / sample_hz);
        let k2 = k * k;
        let norm = 1.0 / (1.0 + SQRT_2 * k + k2);
        let b0 = k2 * norm;
        Butterworth2 {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k2 - 1.0) * norm, (1.0 - SQRT_2 * k + k2) * norm],
            x: [0.0; 2],
            y: [0.0; 2],
            primed: false,
        }
    }

    pub fn coefficients(&self) -> ([f64; 3], [f64; 2]) {
        (self.b, self.a)
    }

    /// The first sample initialises the memory at steady state.
    pub fn filter(&mut self, input: f64) -> f64 {
        if !self.primed {
            self.x = [input; 2];
            self.y = [input; 2];
            self.primed = true;
        }
        let out = self.b[0] * input + self.b[1] * self.x[0] + self.b[2] * self.x[1]
            - self.a[0] * self.y[0]
            - self.a[1] * self.y[1];
        self.x = [input, self.x[0]];
        self.y = [out, self.y[0]];
        out
    }

    pub fn reset(&mut self) {
        self.primed = false;
        self.x = [0.0; 2];
        self.y = [0.0; 2];
    }
}

/// Low-pass filters a sampled signal, then differences consecutive outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredDerivative {
    filter: Butterworth2,
    period: f64,
    last: Option<f64>,
    value: f64,
    rate: f64,
}

impl FilteredDerivative {
    pub fn new(cutoff_hz: f64, sample_hz: f64) -> Self {
        FilteredDerivative {
            filter: Butterworth2::new(cutoff_hz, sample_hz),
            period: 1.0 / sample_hz,
            last: None,
            value: 0.0,
            rate: 0.0,
        }
    }

    /// Feeds one sample; returns `(filtered value, derivative)`.
    pub fn update(&mut self, sample: f64) -> (f64, f64) {
        let y = self.filter.filter(sample);
        self.rate = match self.last {
            Some(prev) => (y - prev) / self.period,
            None => 0.0,
        };
        self.last = Some(y);
        self.value = y;
        (y, self.rate)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}
