//! Tables behind the `legs`, `sweep`, `energy` and `clearance` commands.

use serde::Serialize;

use flapsim_core::energetics::{linear_fit, CostOfTransport};
use flapsim_core::hydrostatics::{
    bond_number, capillary_length, curvature_force, flotation_check, liftoff_requirement, min_leg_length_worst_case,
    newtons_to_mg_force, recommended_leg_length_hu_fit, FlotationReport, LegGeometry, WaterProperties,
};
use flapsim_core::plant::Physics;
use flapsim_core::scenario::{self, cot_sweep, is_nondecreasing, speed_sweep, CotRow, NullRecorder, SweepCell};

use crate::config::{self, Origin};
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct LegsReport {
    pub mass_mg: f64,
    pub leg_length_mm: f64,
    pub capillary_length_mm: f64,
    pub bond_number: f64,
    pub curvature_force_mg: f64,
    pub max_curvature_force_mg: f64,
    pub min_leg_length_mm: f64,
    pub fit_curvature_force_dynes: f64,
    pub fit_leg_length_mm: f64,
    pub liftoff_force_mg: f64,
    pub lift_to_weight: f64,
    pub flotation: FlotationReport,
}

/// Hydrostatic design numbers for a body of `mass_mg` on legs of total
/// length `leg_length_mm`.
pub fn legs(mass_mg: f64, leg_length_mm: f64, legs: &LegGeometry, water: &WaterProperties) -> LegsReport {
    let mut legs = legs.clone();
    let total = legs.total_length();
    // keep the proportions of the configured segments
    let scale = leg_length_mm * 1e-3 / total;
    for s in legs.segment_lengths.iter_mut() {
        *s *= scale;
    }
    let mass = mass_mg * 1e-6;
    let weight = mass * water.gravity;
    let fc = curvature_force(&legs, water);
    let fit = recommended_leg_length_hu_fit(weight, water);
    let lift = liftoff_requirement(&legs, water, weight);
    let g = water.gravity;
    LegsReport {
        mass_mg,
        leg_length_mm,
        capillary_length_mm: capillary_length(water) * 1e3,
        bond_number: bond_number(&legs, water),
        curvature_force_mg: newtons_to_mg_force(fc.at_contact_angle, g),
        max_curvature_force_mg: newtons_to_mg_force(fc.max, g),
        min_leg_length_mm: min_leg_length_worst_case(weight, water) * 1e3,
        fit_curvature_force_dynes: fit.max_curvature_force_dynes,
        fit_leg_length_mm: fit.length * 1e3,
        liftoff_force_mg: newtons_to_mg_force(lift.force, g),
        lift_to_weight: lift.lift_to_weight,
        flotation: flotation_check(&legs, water, mass),
    }
}

impl std::fmt::Display for LegsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "body mass              {:>10.1} mg", self.mass_mg)?;
        writeln!(f, "total leg length       {:>10.2} mm", self.leg_length_mm)?;
        writeln!(f, "capillary length       {:>10.3} mm", self.capillary_length_mm)?;
        writeln!(f, "bond number            {:>10.4}", self.bond_number)?;
        writeln!(f, "curvature force        {:>10.1} mg (max {:.1})", self.curvature_force_mg, self.max_curvature_force_mg)?;
        writeln!(f, "min leg length         {:>10.2} mm", self.min_leg_length_mm)?;
        writeln!(
            f,
            "strider fit            {:>10.1} dyn -> {:.1} mm",
            self.fit_curvature_force_dynes, self.fit_leg_length_mm
        )?;
        writeln!(f, "liftoff force          {:>10.1} mg ({:.2} x weight)", self.liftoff_force_mg, self.lift_to_weight)?;
        let fl = &self.flotation;
        writeln!(
            f,
            "flotation              {:>10} (margin {:.3e} N)",
            if fl.floats() { "floats" } else { "sinks" },
            fl.flotation_margin
        )?;
        for n in &fl.notes {
            writeln!(f, "note: {n:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub second_harmonic: f64,
    pub duration: f64,
    pub cells: Vec<SweepCell>,
    pub monotone_in_amplitude: bool,
    pub monotone_in_frequency: bool,
}

/// Ground speed grid. Cells in the lift-off regime are reported but left
/// out of the monotonicity checks.
pub fn sweep(physics: &Physics, amplitudes: &[f64], frequencies: &[f64], mu: f64, duration: f64) -> Result<SweepReport> {
    let cells = speed_sweep(physics, amplitudes, frequencies, mu, duration)?;
    let nf = frequencies.len();
    let speed = |i: usize, j: usize| cells[i * nf + j].speed;
    let by_amp = (0..nf).all(|j| {
        let col: Vec<f64> = (0..amplitudes.len()).filter_map(|i| speed(i, j)).collect();
        is_nondecreasing(&col)
    });
    let by_freq = (0..amplitudes.len()).all(|i| {
        let row: Vec<f64> = (0..nf).filter_map(|j| speed(i, j)).collect();
        is_nondecreasing(&row)
    });
    Ok(SweepReport {
        second_harmonic: mu,
        duration,
        cells,
        monotone_in_amplitude: by_amp,
        monotone_in_frequency: by_freq,
    })
}

impl std::fmt::Display for SweepReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:>8} {:>8} {:>12}", "A (V)", "f (Hz)", "speed (mm/s)")?;
        for c in &self.cells {
            match c.speed {
                Some(v) => writeln!(f, "{:>8.1} {:>8.1} {:>12.3}", c.amplitude, c.frequency, v * 1e3)?,
                None => writeln!(f, "{:>8.1} {:>8.1} {:>12}", c.amplitude, c.frequency, "liftoff")?,
            }
        }
        writeln!(f, "monotone in amplitude: {}", self.monotone_in_amplitude)?;
        write!(f, "monotone in frequency: {}", self.monotone_in_frequency)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub amplitude: f64,
    pub second_harmonic: f64,
    pub rows: Vec<CotRow>,
    /// Mean ground power against frequency: intercept (W), slope (W/Hz), r^2.
    pub power_fit: (f64, f64, f64),
    pub ground_cot_decreasing: bool,
    pub flight_scenario: String,
    pub flight_cost_of_transport: CostOfTransport,
    /// Smallest ground CoT over flight CoT.
    pub ground_to_flight_ratio: Option<f64>,
}

/// Ground cost of transport per frequency, hover power and the cost of the
/// bundled (or given) flight scenario.
pub fn energy(
    physics: &Physics,
    amplitude: f64,
    mu: f64,
    frequencies: &[f64],
    duration: f64,
    flight: &Origin,
) -> Result<EnergyReport> {
    let rows = cot_sweep(physics, amplitude, mu, frequencies, duration)?;
    let ground: Vec<&CotRow> = rows.iter().filter(|r| r.label == "ground").collect();
    let f: Vec<f64> = ground.iter().map(|r| r.frequency).collect();
    let p: Vec<f64> = ground.iter().map(|r| r.mean_power).collect();
    let power_fit = linear_fit(&f, &p);
    let cot: Vec<Option<f64>> = ground.iter().map(|r| r.cost_of_transport.value()).collect();
    let ground_cot_decreasing = cot.iter().all(Option::is_some)
        && cot.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());

    let flight_sc = config::load(flight)?;
    let flight_run = scenario::run(&flight_sc, &mut NullRecorder)?;
    let flight_cot = flight_run.cost_of_transport;
    let min_ground = cot.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let ratio = flight_cot.value().filter(|_| min_ground.is_finite()).map(|v| min_ground / v);
    Ok(EnergyReport {
        amplitude,
        second_harmonic: mu,
        rows,
        power_fit,
        ground_cot_decreasing,
        flight_scenario: flight_sc.name,
        flight_cost_of_transport: flight_cot,
        ground_to_flight_ratio: ratio,
    })
}

impl std::fmt::Display for EnergyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:>8} {:>8} {:>12} {:>12} {:>12}", "mode", "f (Hz)", "speed (mm/s)", "power (mW)", "CoT (J/m = mJ/mm)")?;
        let cot = |c: &CostOfTransport| match c.value() {
            Some(v) => format!("{v:.4}"),
            None => "n/a".to_string(),
        };
        for r in &self.rows {
            writeln!(
                f,
                "{:>8} {:>8.1} {:>12.3} {:>12.3} {:>12}",
                r.label,
                r.frequency,
                r.speed * 1e3,
                r.mean_power * 1e3,
                cot(&r.cost_of_transport)
            )?;
        }
        let (a, b, r2) = self.power_fit;
        writeln!(f, "ground power fit: P = {a:.4e} + {b:.4e} f W, r^2 = {r2:.6}")?;
        writeln!(f, "ground CoT strictly decreasing: {}", self.ground_cot_decreasing)?;
        writeln!(f, "{} CoT: {}", self.flight_scenario, cot(&self.flight_cost_of_transport))?;
        match self.ground_to_flight_ratio {
            Some(r) => write!(f, "best ground / flight: {r:.2}"),
            None => write!(f, "best ground / flight: n/a"),
        }
    }
}
