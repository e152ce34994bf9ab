use std::path::Path;
use std::process::{Command, Output};

fn flapsim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flapsim"))
        .args(args)
        .env("FLAPSIM_OUT", out)
        .output()
        .unwrap()
}

#[test]
fn run_writes_logs_under_env_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = flapsim(&["run", "ground-rods", "--dt", "1e-4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "power.csv", "events.csv", "summary.json"] {
        assert!(dir.path().join("ground-rods").join(f).is_file(), "{f}");
    }
    let s: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("ground-rods/summary.json")).unwrap()).unwrap();
    assert_eq!(s["physics_step"].as_f64().unwrap(), 1.0 / 240.0 / 42.0);
}

#[test]
fn out_flag_beats_env() {
    let env = tempfile::tempdir().unwrap();
    let flag = tempfile::tempdir().unwrap();
    let o = flapsim(&["run", "ground-rods", "-o", flag.path().to_str().unwrap()], env.path());
    assert!(o.status.success());
    assert!(flag.path().join("ground-rods/summary.json").is_file());
    assert!(!env.path().join("ground-rods").exists());
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(flapsim(&["run", "no-such-scenario"], dir.path()).status.code(), Some(1));
    let o = flapsim(&["run", "hover", "--dt", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dt"));
}

#[test]
fn numerical_abort_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("blowup.toml");
    std::fs::write(
        &cfg,
        "schema_version = 1\ninclude = [\"robot.toml\"]\n[scenario]\nname = \"blowup\"\nsurface = \"ground\"\nduration = 0.5\n\
         [initial]\nposition = [0.0, 0.0, 0.04]\n[physics.body]\ninertia = [1e-300, 1e-300, 1e-300]\n\
         [control]\nkind = \"open_loop\"\n[[control.drive]]\ntime = 0.0\nfrequency = 140.0\n\
         left = { amplitude = 250.0 }\nright = { amplitude = 200.0 }\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("robot.toml"), flapsim::bundled::get("robot.toml").unwrap()).unwrap();
    let o = flapsim(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    // logs up to the abort are flushed
    let traj = std::fs::read_to_string(dir.path().join("blowup/trajectory.csv")).unwrap();
    assert!(traj.lines().count() >= 2);
}

#[test]
fn legs_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = flapsim(&["legs", "--mass", "80", "--length", "50", "--json"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["lift_to_weight"].as_f64().unwrap() - 10.17).abs() < 0.01);
    let text = flapsim(&["legs"], dir.path());
    assert!(String::from_utf8_lossy(&text.stdout).contains("capillary length"));
}

#[test]
fn clearance_is_inclusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = |gap: &str| String::from_utf8(flapsim(&["clearance", gap], dir.path()).stdout).unwrap();
    assert!(out("30").ends_with("pass\n"));
    assert!(out("23").ends_with("pass\n"));
    assert!(out("0").ends_with("fail\n"));
}

#[test]
fn sweep_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let o = flapsim(
        &["sweep", "--amplitudes", "250", "--frequencies", "100", "--duration", "0.5", "--json", "--save"],
        dir.path(),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 1);
    assert!(v["cells"][0]["speed"].as_f64().unwrap() > 0.0);
    assert_eq!(std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap().lines().count(), 2);
}

#[test]
fn energy_reports_flight_cost() {
    let dir = tempfile::tempdir().unwrap();
    let o = flapsim(&["energy", "--json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["ground_to_flight_ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn list_names_every_runnable_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = flapsim(&["list"], dir.path());
    let names: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names.len(), 10);
    assert!(!names.iter().any(|n| n == "robot"));
}
