//! Log files written by a run.
//!
//! Every run directory holds:
//!
//! * `trajectory.csv`, one row per control tick:
//!   `t, x, y, z, vx, vy, vz, qw, qx, qy, qz, wx, wy, wz, mode,
//!    x_d, y_d, z_d, frequency, amp_left, mu_left, amp_right, mu_right, saturated`.
//!   Setpoint columns are empty for open-loop runs. SI units, body rates in rad/s.
//! * `power.csv`, on the uniform electrical grid:
//!   `t, v_left, i_left, v_right, i_right, p_rectified, p_signed`.
//! * `events.csv`: `t, kind, detail` with `detail` a JSON object.
//! * `summary.json`.
//!
//! Floats use the shortest representation that round-trips, so identical
//! runs give identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use flapsim_core::dynamics::{Event, TouchdownOutcome};
use flapsim_core::energetics::{CostOfTransport, PowerSample};
use flapsim_core::scenario::{self, Recorder, RunSummary, Scenario, TrajectoryRow};

use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: [&str; 24] = [
    "t", "x", "y", "z", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "wx", "wy", "wz", "mode", "x_d", "y_d", "z_d",
    "frequency", "amp_left", "mu_left", "amp_right", "mu_right", "saturated",
];
pub const POWER_HEADER: [&str; 7] = ["t", "v_left", "i_left", "v_right", "i_right", "p_rectified", "p_signed"];
pub const EVENT_HEADER: [&str; 3] = ["t", "kind", "detail"];

type Csv = csv::Writer<BufWriter<File>>;

fn open_csv(path: &Path, header: &[&str]) -> Result<Csv> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header)?;
    Ok(w)
}

/// Streams a run into CSV files. The first write error is kept and
/// reported by [`CsvRecorder::finish`].
pub struct CsvRecorder {
    trajectory: Csv,
    power: Csv,
    events: Csv,
    error: Option<csv::Error>,
    buf: Vec<String>,
}

impl CsvRecorder {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(CsvRecorder {
            trajectory: open_csv(&dir.join("trajectory.csv"), &TRAJECTORY_HEADER)?,
            power: open_csv(&dir.join("power.csv"), &POWER_HEADER)?,
            events: open_csv(&dir.join("events.csv"), &EVENT_HEADER)?,
            error: None,
            buf: Vec::with_capacity(24),
        })
    }

    fn keep(&mut self, r: std::result::Result<(), csv::Error>) {
        if let (Err(e), None) = (r, &self.error) {
            self.error = Some(e);
        }
    }

    pub fn finish(mut self) -> Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e.into());
        }
        for w in [&mut self.trajectory, &mut self.power, &mut self.events] {
            w.flush().map_err(|e| Error::io("log", e))?;
        }
        Ok(())
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

impl Recorder for CsvRecorder {
    fn trajectory(&mut self, row: &TrajectoryRow) {
        let s = &row.state;
        let q = s.attitude.coords;
        self.buf.clear();
        self.buf.push(num(s.time));
        self.buf.extend(s.position.iter().map(|v| num(*v)));
        self.buf.extend(s.velocity.iter().map(|v| num(*v)));
        self.buf.extend([q.w, q.x, q.y, q.z].map(num));
        self.buf.extend(s.body_rates.iter().map(|v| num(*v)));
        self.buf.push(s.mode.as_str().to_string());
        match &row.setpoint {
            Some(sp) => self.buf.extend(sp.position.iter().map(|v| num(*v))),
            None => self.buf.extend([String::new(), String::new(), String::new()]),
        }
        let d = &row.drive;
        self.buf.extend(
            [d.frequency, d.left.amplitude, d.left.second_harmonic, d.right.amplitude, d.right.second_harmonic].map(num),
        );
        self.buf.push(match &row.control {
            Some(c) => u8::from(c.saturated).to_string(),
            None => String::new(),
        });
        let r = self.trajectory.write_record(&self.buf);
        self.keep(r);
    }

    fn power(&mut self, p: &PowerSample) {
        let r = self.power.write_record(
            [p.time, p.voltage_left, p.current_left, p.voltage_right, p.current_right, p.rectified, p.signed].map(num),
        );
        self.keep(r);
    }

    fn event(&mut self, time: f64, event: &Event) {
        let detail = serde_json::to_value(event).unwrap_or_default();
        let kind = detail.get("kind").and_then(|k| k.as_str()).unwrap_or("").to_string();
        let mut rest = detail;
        if let Some(obj) = rest.as_object_mut() {
            obj.remove("kind");
        }
        let r = self.events.write_record([num(time), kind, rest.to_string()]);
        self.keep(r);
    }
}

/// JSON form of a run summary.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRecord {
    pub name: String,
    pub duration: f64,
    pub physics_step: f64,
    pub final_position: [f64; 3],
    pub final_velocity: [f64; 3],
    pub final_attitude_wxyz: [f64; 4],
    pub final_mode: &'static str,
    pub landing: Option<TouchdownOutcome>,
    pub touchdown_speed: Option<f64>,
    pub rms_error: Option<[f64; 3]>,
    pub altitude_reached_at: Option<f64>,
    pub displacement: [f64; 3],
    pub path_length: f64,
    pub mean_speed: f64,
    pub mean_yaw_rate_deg: f64,
    pub rectified_energy: f64,
    pub signed_energy: f64,
    pub mean_power: f64,
    pub cost_of_transport: CostOfTransport,
    pub saturation_count: usize,
    pub event_count: usize,
}

impl From<&RunSummary> for SummaryRecord {
    fn from(s: &RunSummary) -> Self {
        let f = &s.final_state;
        let q = f.attitude.coords;
        SummaryRecord {
            name: s.name.clone(),
            duration: s.duration,
            physics_step: s.physics_step,
            final_position: f.position.into(),
            final_velocity: f.velocity.into(),
            final_attitude_wxyz: [q.w, q.x, q.y, q.z],
            final_mode: f.mode.as_str(),
            landing: s.landing,
            touchdown_speed: s.touchdown_speed,
            rms_error: s.rms_error,
            altitude_reached_at: s.altitude_reached_at,
            displacement: s.displacement.into(),
            path_length: s.path_length,
            mean_speed: s.mean_speed,
            mean_yaw_rate_deg: s.mean_yaw_rate.to_degrees(),
            rectified_energy: s.rectified_energy,
            signed_energy: s.signed_energy,
            mean_power: s.mean_power,
            cost_of_transport: s.cost_of_transport,
            saturation_count: s.saturation_count,
            event_count: s.events.len(),
        }
    }
}

pub fn write_summary(path: &Path, summary: &RunSummary) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &SummaryRecord::from(summary))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Files produced by [`run_to_dir`].
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub dir: PathBuf,
    pub summary: RunSummary,
}

/// Runs a scenario and writes all logs into `dir`. Logs written before a
/// numerical abort are still flushed.
pub fn run_to_dir(sc: &Scenario, dir: &Path) -> Result<RunFiles> {
    let mut rec = CsvRecorder::create(dir)?;
    let result = scenario::run(sc, &mut rec);
    rec.finish()?;
    let summary = result?;
    write_summary(&dir.join("summary.json"), &summary)?;
    Ok(RunFiles {
        dir: dir.to_path_buf(),
        summary,
    })
}
