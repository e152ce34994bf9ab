//! Static support of a light body on a water surface by hydrophobic legs.
//!
//! Surface tension supplies a curvature force of at most `2 sigma L` along a
//! total contact length `L`. Buoyancy is only tracked as the order-of-magnitude
//! ratio `w / l_c`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::STANDARD_GRAVITY;

/// One dyne in newtons.
pub const DYNE: f64 = 1e-5;

/// Lift-to-weight ratio needed by the water-lily beetle to leave the surface.
pub const BIOLOGICAL_LIFT_TO_WEIGHT: f64 = 3.4;

/// Bond number quoted for the 0.5 mm legs in the original design notes. It
/// does not agree with `(w / l_c)^2` and is carried only as a note.
pub const QUOTED_BOND_NUMBER: f64 = 0.31;

/// A leg's dimple has decayed about 6 mm out, so neighbours need twice that.
pub const MIN_LEG_SPACING: f64 = 12e-3;

/// Prefactor and exponent of the water-strider curvature-force fit, in dynes.
pub const STRIDER_FIT_PREFACTOR: f64 = 48.0;
pub const STRIDER_FIT_EXPONENT: f64 = 0.58;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct WaterProperties {
    /// N/m
    pub surface_tension: f64,
    /// kg/m^3
    pub density: f64,
    pub gravity: f64,
}

impl Default for WaterProperties {
    fn default() -> Self {
        WaterProperties {
            surface_tension: 0.072,
            density: 1000.0,
            gravity: STANDARD_GRAVITY,
        }
    }
}

impl WaterProperties {
    pub fn validate(&self) -> Result<()> {
        if !(self.surface_tension > 0.0) || !(self.density > 0.0) || !(self.gravity > 0.0) {
            return Err(Error::param("water", "surface tension, density and gravity must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CrossSection {
    #[default]
    Cylindrical,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LegGeometry {
    pub leg_count: usize,
    pub cross_section: CrossSection,
    /// Leg radius `w` (m).
    pub radius: f64,
    /// Lengths of the individual horizontal pieces (m).
    pub segment_lengths: Vec<f64>,
    /// Gap between adjacent legs (m).
    pub spacing: f64,
    /// Mass per unit length of the leg material (kg/m).
    pub linear_density: f64,
    /// Contact angle (degrees).
    pub contact_angle_deg: f64,
    /// Submerged angle (degrees); the statics assume 90.
    pub submerged_angle_deg: f64,
}

impl Default for LegGeometry {
    fn default() -> Self {
        LegGeometry {
            leg_count: 3,
            cross_section: CrossSection::Cylindrical,
            radius: 0.25e-3,
            segment_lengths: vec![25e-3, 12.5e-3, 12.5e-3],
            spacing: 15e-3,
            // carbon fibre rod, 3.6 mg/cm
            linear_density: 3.6e-4,
            contact_angle_deg: 135.0,
            submerged_angle_deg: 90.0,
        }
    }
}

impl LegGeometry {
    pub fn total_length(&self) -> f64 {
        self.segment_lengths.iter().sum()
    }

    pub fn leg_mass(&self) -> f64 {
        self.total_length() * self.linear_density
    }

    pub fn validate(&self) -> Result<()> {
        if self.segment_lengths.iter().any(|l| !(*l >= 0.0)) || !(self.total_length() > 0.0) {
            return Err(Error::param("segment_lengths", "total length must be > 0"));
        }
        if !(self.spacing >= 0.0) {
            return Err(Error::param("spacing", "must be >= 0"));
        }
        if !(self.contact_angle_deg > 0.0 && self.contact_angle_deg < 180.0) {
            return Err(Error::param("contact_angle_deg", "must lie in (0, 180)"));
        }
        if !(self.radius >= 0.0) {
            return Err(Error::param("radius", "must be >= 0"));
        }
        Ok(())
    }
}

/// `l_c = sqrt(sigma / (rho g))`.
pub fn capillary_length(water: &WaterProperties) -> f64 {
    libm::sqrt(water.surface_tension / (water.density * water.gravity))
}

/// `Bo = (w / l_c)^2`.
pub fn bond_number(legs: &LegGeometry, water: &WaterProperties) -> f64 {
    let r = legs.radius / capillary_length(water);
    r * r
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvatureForce {
    /// `2 sigma L |cos theta|` (N).
    pub at_contact_angle: f64,
    /// `2 sigma L` (N).
    pub max: f64,
}

pub fn curvature_force(legs: &LegGeometry, water: &WaterProperties) -> CurvatureForce {
    let max = 2.0 * water.surface_tension * legs.total_length();
    let theta = legs.contact_angle_deg.to_radians();
    CurvatureForce {
        at_contact_angle: max * libm::cos(theta).abs(),
        max,
    }
}

/// Shortest total leg length whose full curvature force carries `weight` (m).
pub fn min_leg_length_worst_case(weight: f64, water: &WaterProperties) -> f64 {
    weight / (2.0 * water.surface_tension)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StriderFit {
    /// Curvature force demanded by the fit (dyn).
    pub max_curvature_force_dynes: f64,
    /// Leg length that supplies it (m).
    pub length: f64,
}

/// Evaluates `max(F_c) = 48 F_W^0.58` with both forces in dynes.
pub fn strider_fit_force_dynes(weight_dynes: f64) -> f64 {
    STRIDER_FIT_PREFACTOR * libm::pow(weight_dynes, STRIDER_FIT_EXPONENT)
}

/// Leg length recommended by the water-strider survey fit for a body of
/// weight `weight` (N).
pub fn recommended_leg_length_hu_fit(weight: f64, water: &WaterProperties) -> StriderFit {
    let dynes = strider_fit_force_dynes(weight / DYNE);
    StriderFit {
        max_curvature_force_dynes: dynes,
        length: dynes * DYNE / (2.0 * water.surface_tension),
    }
}

/// Repeats the fit with the legs' own mass added until the length settles.
/// Returns the sequence of lengths, starting with the bare-body value.
pub fn recommended_leg_length_with_leg_mass(
    body_mass: f64,
    linear_density: f64,
    water: &WaterProperties,
    tolerance: f64,
) -> Vec<f64> {
    let mut lengths = Vec::new();
    let mut length = recommended_leg_length_hu_fit(body_mass * water.gravity, water).length;
    lengths.push(length);
    for _ in 0..100 {
        let mass = body_mass + linear_density * length;
        let next = recommended_leg_length_hu_fit(mass * water.gravity, water).length;
        lengths.push(next);
        let done = (next - length).abs() <= tolerance * next;
        length = next;
        if done {
            break;
        }
    }
    lengths
}

pub fn min_leg_spacing() -> f64 {
    MIN_LEG_SPACING
}

/// Boundary inclusive: exactly 12 mm passes.
pub fn spacing_ok(legs: &LegGeometry) -> bool {
    legs.spacing >= MIN_LEG_SPACING
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LiftoffRequirement {
    /// `F_W + 2 sigma L` (N).
    pub force: f64,
    /// `F_L / F_W`.
    pub lift_to_weight: f64,
}

pub fn liftoff_requirement(legs: &LegGeometry, water: &WaterProperties, weight: f64) -> LiftoffRequirement {
    let force = weight + curvature_force(legs, water).max;
    LiftoffRequirement {
        force,
        lift_to_weight: force / weight,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum FlotationNote {
    /// `(w/l_c)^2` disagrees with the quoted 0.31.
    BondNumberDiscrepancy { computed: f64, quoted: f64 },
    SpacingBelowMinimum { spacing: f64, minimum: f64 },
    /// `w / l_c` is not small, so ignoring buoyancy is questionable.
    BuoyancyNotNegligible { ratio: f64 },
    Sinks { deficit: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlotationReport {
    pub capillary_length: f64,
    pub bond_number: f64,
    pub max_curvature_force: f64,
    pub curvature_force: f64,
    /// Order estimate of `F_B / F_C`, i.e. `w / l_c`.
    pub buoyancy_ratio: f64,
    pub weight: f64,
    /// `F_C,max - F_W` (N); negative means the body sinks.
    pub flotation_margin: f64,
    pub liftoff_force: f64,
    pub lift_to_weight: f64,
    pub biological_lift_to_weight: f64,
    /// Curvature force the strider survey fit predicts for this weight (N).
    pub strider_fit_force: f64,
    pub notes: Vec<FlotationNote>,
}

impl FlotationReport {
    pub fn floats(&self) -> bool {
        self.flotation_margin > 0.0
    }
}

/// Buoyancy is taken as negligible below this `w / l_c`.
pub const BUOYANCY_RATIO_LIMIT: f64 = 0.2;

pub fn flotation_check(legs: &LegGeometry, water: &WaterProperties, total_mass: f64) -> FlotationReport {
    let l_c = capillary_length(water);
    let bo = bond_number(legs, water);
    let fc = curvature_force(legs, water);
    let weight = total_mass * water.gravity;
    let margin = fc.max - weight;
    let lift = liftoff_requirement(legs, water, weight);
    let ratio = legs.radius / l_c;

    let mut notes = vec![FlotationNote::BondNumberDiscrepancy {
        computed: bo,
        quoted: QUOTED_BOND_NUMBER,
    }];
    if !spacing_ok(legs) {
        notes.push(FlotationNote::SpacingBelowMinimum {
            spacing: legs.spacing,
            minimum: MIN_LEG_SPACING,
        });
    }
    if ratio >= BUOYANCY_RATIO_LIMIT {
        notes.push(FlotationNote::BuoyancyNotNegligible { ratio });
    }
    if margin <= 0.0 {
        notes.push(FlotationNote::Sinks { deficit: -margin });
    }

    FlotationReport {
        capillary_length: l_c,
        bond_number: bo,
        max_curvature_force: fc.max,
        curvature_force: fc.at_contact_angle,
        buoyancy_ratio: ratio,
        weight,
        flotation_margin: margin,
        liftoff_force: lift.force,
        lift_to_weight: lift.lift_to_weight,
        biological_lift_to_weight: BIOLOGICAL_LIFT_TO_WEIGHT,
        strider_fit_force: strider_fit_force_dynes(weight / DYNE) * DYNE,
        notes,
    }
}

/// Newtons expressed as milligrams of force.
pub fn newtons_to_mg_force(force: f64, gravity: f64) -> f64 {
    force / gravity * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MG: f64 = 1e-6;

    fn water() -> WaterProperties {
        WaterProperties::default()
    }

    #[test]
    fn capillary_length_default() {
        let l = capillary_length(&water());
        assert_relative_eq!(l, (0.072f64 / 9810.0).sqrt(), max_relative = 1e-15);
        assert!((2.70e-3..2.72e-3).contains(&l));
    }

    #[test]
    fn capillary_length_scaling() {
        let w = water();
        let four = WaterProperties {
            surface_tension: 4.0 * w.surface_tension,
            ..w
        };
        assert_relative_eq!(capillary_length(&four), 2.0 * capillary_length(&w), max_relative = 1e-14);
        let dense = WaterProperties { density: 1e30, ..w };
        assert!(capillary_length(&dense) < 1e-15);
    }

    #[test]
    fn bond_number_examples() {
        let w = water();
        let at_lc = LegGeometry {
            radius: capillary_length(&w),
            ..LegGeometry::default()
        };
        assert_relative_eq!(bond_number(&at_lc, &w), 1.0, max_relative = 1e-14);
        let zero = LegGeometry {
            radius: 0.0,
            ..LegGeometry::default()
        };
        assert_eq!(bond_number(&zero, &w), 0.0);
        // quoted geometry 0.25 mm / 2.6 mm
        let r: f64 = 0.25 / 2.6;
        assert_relative_eq!(r * r, 9.2456e-3, max_relative = 1e-4);
        let bo = bond_number(&LegGeometry::default(), &w);
        assert!((0.008..=0.010).contains(&bo), "{bo}");
    }

    #[test]
    fn curvature_force_examples() {
        let w = water();
        let legs = LegGeometry {
            segment_lengths: vec![0.05],
            ..LegGeometry::default()
        };
        let f = curvature_force(&legs, &w);
        assert_relative_eq!(f.max, 7.2e-3, max_relative = 1e-12);
        let mgf = newtons_to_mg_force(f.max, 9.81);
        assert!((700.0..=800.0).contains(&mgf), "{mgf}");
        let flat = LegGeometry {
            contact_angle_deg: 90.0,
            ..legs.clone()
        };
        assert!(curvature_force(&flat, &w).at_contact_angle.abs() < 1e-18);
        let double = LegGeometry {
            segment_lengths: vec![0.1],
            ..legs.clone()
        };
        let d = curvature_force(&double, &w);
        assert_relative_eq!(d.max, 2.0 * f.max, max_relative = 1e-14);
        assert_relative_eq!(d.at_contact_angle, 2.0 * f.at_contact_angle, max_relative = 1e-14);
    }

    #[test]
    fn worst_case_length() {
        let w = water();
        let l = min_leg_length_worst_case(80.0 * MG * 9.81, &w);
        assert_relative_eq!(l, 5.45e-3, max_relative = 1e-3);
        assert_eq!(min_leg_length_worst_case(0.0, &w), 0.0);
        let half = WaterProperties {
            surface_tension: 0.036,
            ..w
        };
        assert_relative_eq!(min_leg_length_worst_case(1e-3, &half), 2.0 * min_leg_length_worst_case(1e-3, &w));
    }

    #[test]
    fn strider_fit_examples() {
        let w = water();
        let fit = recommended_leg_length_hu_fit(80.0 * MG * 9.81, &w);
        assert!((590.0..615.0).contains(&fit.max_curvature_force_dynes));
        assert!((0.041..0.043).contains(&fit.length), "{}", fit.length);
        assert_relative_eq!(strider_fit_force_dynes(1.0), 48.0);
        let unit = recommended_leg_length_hu_fit(DYNE, &w);
        assert_relative_eq!(unit.max_curvature_force_dynes, 48.0, max_relative = 1e-12);
    }

    #[test]
    fn leg_mass_iteration_rises_toward_five_cm() {
        let w = water();
        let seq = recommended_leg_length_with_leg_mass(80.0 * MG, 3.6e-4, &w, 1e-12);
        assert!(seq.windows(2).all(|p| p[1] >= p[0]));
        let last = *seq.last().unwrap();
        // self-consistency of the fixed point
        let check = recommended_leg_length_hu_fit((80.0 * MG + 3.6e-4 * last) * 9.81, &w).length;
        assert_relative_eq!(check, last, max_relative = 1e-10);
        assert!(last > seq[0] && last < 0.05, "{last}");
        // roughly 15 mg of legs
        assert!((14.0..18.0).contains(&(3.6e-4 * last / MG)));
    }

    #[test]
    fn spacing_rule() {
        let mut legs = LegGeometry::default();
        assert!(spacing_ok(&legs));
        legs.spacing = 10e-3;
        assert!(!spacing_ok(&legs));
        legs.spacing = 12e-3;
        assert!(spacing_ok(&legs));
        assert_eq!(min_leg_spacing(), 12e-3);
    }

    #[test]
    fn liftoff_examples() {
        let w = water();
        let legs = LegGeometry::default();
        let weight = 80.0 * MG * 9.81;
        let lift = liftoff_requirement(&legs, &w, weight);
        assert!((9.0..=10.5).contains(&lift.lift_to_weight));
        let mgf = newtons_to_mg_force(lift.force, 9.81);
        assert!((700.0..=820.0).contains(&mgf), "{mgf}");
        let none = LegGeometry {
            segment_lengths: vec![0.0],
            ..legs
        };
        assert_eq!(liftoff_requirement(&none, &w, weight).lift_to_weight, 1.0);
    }

    #[test]
    fn flotation_examples() {
        let w = water();
        let legs = LegGeometry::default();
        let light = flotation_check(&legs, &w, 95.0 * MG);
        assert!(light.floats());
        assert!(light.buoyancy_ratio < BUOYANCY_RATIO_LIMIT);
        assert!(matches!(light.notes[0], FlotationNote::BondNumberDiscrepancy { .. }));
        let heavy = flotation_check(&legs, &w, 1e-3);
        assert!(!heavy.floats());
        assert!(heavy.notes.iter().any(|n| matches!(n, FlotationNote::Sinks { .. })));
        let empty = flotation_check(&legs, &w, 0.0);
        assert_eq!(empty.flotation_margin, empty.max_curvature_force);
    }

    #[test]
    fn dyne_round_trip() {
        for &f in &[1e-7, 3.3e-4, 0.1] {
            let back = (f / DYNE) * DYNE;
            assert_relative_eq!(back, f, max_relative = 1e-12);
        }
    }
}
