use std::fs;

use flapsim::config::{self, merge, Origin, Overrides};
use flapsim::{bundled, Error};
use flapsim_core::dynamics::Surface;
use flapsim_core::scenario::Control;

const HEADER: &str = "schema_version = 1\ninclude = [\"robot.toml\"]\n";

fn ground(body: &str) -> String {
    format!(
        "{HEADER}[scenario]\nname = \"t\"\nsurface = \"ground\"\nduration = 1.0\n{body}\n[control]\nkind = \"open_loop\"\n[[control.drive]]\ntime = 0.0\nfrequency = 60.0\namplitude = 200.0\nsecond_harmonic = 0.3\n"
    )
}

#[test]
fn every_bundled_scenario_loads() {
    for name in bundled::scenario_names() {
        let sc = config::load(&Origin::resolve(name).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(sc.name, name);
    }
}

#[test]
fn water_include_overrides_mass() {
    let sc = config::load(&Origin::resolve("water-line").unwrap()).unwrap();
    assert_eq!(sc.surface, Surface::Water);
    assert_eq!(sc.physics.body.mass, 95e-6);
    assert_eq!(sc.physics.contact.friction_coefficient, 0.6);
}

#[test]
fn later_keys_win_and_tables_merge() {
    let mut base: toml::Table = "a = 1\n[t]\nx = 1\ny = [1, 2]".parse().unwrap();
    let over: toml::Table = "[t]\ny = [3]\nz = 2".parse().unwrap();
    merge(&mut base, over);
    assert_eq!(base.to_string(), "a = 1\n\n[t]\nx = 1\ny = [3]\nz = 2\n");
}

#[test]
fn per_wing_override() {
    let text = format!(
        "{HEADER}[scenario]\nname = \"t\"\nsurface = \"ground\"\nduration = 1.0\n[control]\nkind = \"open_loop\"\n[[control.drive]]\ntime = 0.0\nfrequency = 60.0\namplitude = 200.0\nright = {{ amplitude = 150.0, second_harmonic = 0.1 }}\n"
    );
    let sc = config::from_str(&text).unwrap();
    let Control::OpenLoop(keys) = sc.control else { panic!() };
    assert_eq!(keys[0].drive.left.amplitude, 200.0);
    assert_eq!(keys[0].drive.right.amplitude, 150.0);
    assert_eq!(keys[0].drive.right.second_harmonic, 0.1);
}

#[test]
fn schema_version_is_checked() {
    let missing = ground("").replace("schema_version = 1\n", "");
    assert!(matches!(config::from_str(&missing), Err(Error::Parse { .. })));
    let future = ground("").replace("schema_version = 1", "schema_version = 2");
    assert!(matches!(config::from_str(&future), Err(Error::Schema { found: 2, .. })));
}

#[test]
fn unknown_keys_are_rejected() {
    let e = config::from_str(&ground("[physics.body]\nmas = 1e-4")).unwrap_err();
    assert!(e.to_string().contains("mas"), "{e}");
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn every_violation_is_listed() {
    let text = ground("dt = 1.0\n[physics.body]\nmass = -1.0\n[physics.aero]\nair_density = 0.0\n")
        .replace("duration = 1.0", "duration = 0.0")
        .replace("amplitude = 200.0", "amplitude = 400.0");
    let Err(Error::Invalid(v)) = config::from_str(&text) else { panic!() };
    let joined = v.join("\n");
    for needle in ["duration", "dt", "mass", "air_density", "drive[0]"] {
        assert!(joined.contains(needle), "{needle} missing from\n{joined}");
    }
}

#[test]
fn schedule_must_increase() {
    let text = format!(
        "{HEADER}[scenario]\nname = \"t\"\nsurface = \"ground\"\nduration = 1.0\n[control]\nkind = \"closed_loop\"\n[[control.setpoints]]\ntime = 1.0\nsetpoint = {{ position = [0.0, 0.0, 0.04] }}\n[[control.setpoints]]\ntime = 1.0\nsetpoint = {{ position = [0.0, 0.0, 0.02] }}\n"
    );
    let Err(Error::Invalid(v)) = config::from_str(&text) else { panic!() };
    assert!(v.iter().any(|s| s.contains("strictly increasing")));
}

#[test]
fn mixed_control_kinds_are_rejected() {
    let text = ground("").replace("kind = \"open_loop\"", "kind = \"open_loop\"\nfrequency = 140.0");
    assert!(matches!(config::from_str(&text), Err(Error::Invalid(_))));
}

#[test]
fn sinking_water_scenario_is_rejected() {
    let text = ground("[physics.body]\nmass = 1e-3").replace("surface = \"ground\"", "surface = \"water\"");
    let Err(Error::Invalid(v)) = config::from_str(&text) else { panic!() };
    assert!(v.iter().any(|s| s.contains("flotation")));
}

#[test]
fn include_cycles_are_detected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.toml"), "schema_version = 1\ninclude = [\"b.toml\"]").unwrap();
    fs::write(dir.path().join("b.toml"), "include = [\"a.toml\"]").unwrap();
    let e = config::load(&Origin::File(dir.path().join("a.toml"))).unwrap_err();
    assert!(matches!(e, Error::IncludeCycle(_)), "{e}");
}

#[test]
fn includes_resolve_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("shared")).unwrap();
    fs::write(dir.path().join("shared/robot.toml"), bundled::get("robot.toml").unwrap()).unwrap();
    fs::write(
        dir.path().join("run.toml"),
        ground("[sensor]\nseed = 9").replace("\"robot.toml\"", "\"shared/robot.toml\""),
    )
    .unwrap();
    let sc = config::load(&Origin::File(dir.path().join("run.toml"))).unwrap();
    assert_eq!(sc.sensor.seed, 9);
}

#[test]
fn overrides_apply_and_validate() {
    let mut sc = config::from_str(&ground("")).unwrap();
    Overrides {
        seed: Some(5),
        dt: Some(1e-4),
    }
    .apply(&mut sc)
    .unwrap();
    assert_eq!((sc.sensor.seed, sc.dt), (5, 1e-4));
    assert!(Overrides { seed: None, dt: Some(-1.0) }.apply(&mut sc).is_err());
}
