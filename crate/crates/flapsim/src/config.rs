//! Scenario files.
//!
//! A scenario is a TOML document with a `schema_version`, an optional list of
//! `include`d files and the tables below. Included files are merged first, in
//! order, and the including file overrides them key by key; arrays are
//! replaced, not concatenated.
//!
//! ```toml
//! schema_version = 1
//! include = ["robot.toml"]
//!
//! [scenario]
//! name = "ground-line"
//! surface = "ground"      # or "water"
//! duration = 2.0          # s
//! dt = 5e-5               # s, optional
//!
//! [control]
//! kind = "open_loop"
//! [[control.drive]]
//! time = 0.0
//! frequency = 60.0
//! amplitude = 210.0
//! second_harmonic = 0.3
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::{Table, Value};

use flapsim_core::control::{ControllerGains, ControllerLimits, WingCommand};
use flapsim_core::dynamics::{Surface, DEFAULT_STEP};
use flapsim_core::plant::{DriveCommand, Physics};
use flapsim_core::scenario::{ClosedLoop, Control, DriveKey, InitialState, Scenario, SetpointKey, FLIGHT_FREQUENCY};
use flapsim_core::sensors::SensorConfig;

use crate::bundled;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: i64 = 1;

/// Where a scenario document comes from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Origin {
    File(PathBuf),
    Bundled(String),
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::File(p) => write!(f, "{}", p.display()),
            Origin::Bundled(n) => write!(f, "<bundled>/{n}"),
        }
    }
}

impl Origin {
    /// A path on disk if it exists, otherwise a bundled scenario name with
    /// or without the `.toml` suffix.
    pub fn resolve(arg: &str) -> Result<Origin> {
        let path = Path::new(arg);
        if path.exists() {
            return Ok(Origin::File(path.to_path_buf()));
        }
        let name = if arg.ends_with(".toml") { arg.to_string() } else { format!("{arg}.toml") };
        if bundled::get(&name).is_some() {
            Ok(Origin::Bundled(name))
        } else {
            Err(Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled scenario")))
        }
    }

    fn read(&self) -> Result<String> {
        match self {
            Origin::File(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e)),
            Origin::Bundled(n) => bundled::get(n)
                .map(str::to_string)
                .ok_or_else(|| Error::UnknownBundled(n.clone())),
        }
    }

    fn join(&self, include: &str) -> Origin {
        match self {
            Origin::File(p) => Origin::File(p.parent().unwrap_or(Path::new(".")).join(include)),
            Origin::Bundled(_) => Origin::Bundled(include.to_string()),
        }
    }
}

fn parse(origin: &Origin) -> Result<Table> {
    let text = origin.read()?;
    text.parse::<Table>().map_err(|e| Error::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })
}

fn check_schema(origin: &Origin, table: &Table, required: bool) -> Result<()> {
    match table.get("schema_version") {
        Some(Value::Integer(v)) if *v == SCHEMA_VERSION => Ok(()),
        Some(Value::Integer(v)) => Err(Error::Schema {
            origin: origin.to_string(),
            found: *v,
            expected: SCHEMA_VERSION,
        }),
        Some(_) => Err(Error::Parse {
            origin: origin.to_string(),
            message: "schema_version must be an integer".into(),
        }),
        None if required => Err(Error::Parse {
            origin: origin.to_string(),
            message: "missing schema_version".into(),
        }),
        None => Ok(()),
    }
}

/// Recursively merges `over` into `base`.
pub fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn load_table(origin: &Origin, stack: &mut BTreeSet<Origin>) -> Result<Table> {
    if !stack.insert(origin.clone()) {
        return Err(Error::IncludeCycle(origin.to_string()));
    }
    let table = parse(origin)?;
    let merged = resolve(origin, table, stack)?;
    stack.remove(origin);
    Ok(merged)
}

fn resolve(origin: &Origin, mut table: Table, stack: &mut BTreeSet<Origin>) -> Result<Table> {
    check_schema(origin, &table, stack.len() == 1)?;
    let includes = match table.remove("include") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(s),
                _ => Err(Error::Parse {
                    origin: origin.to_string(),
                    message: "include entries must be strings".into(),
                }),
            })
            .collect::<Result<Vec<_>>>()?,
        Some(_) => {
            return Err(Error::Parse {
                origin: origin.to_string(),
                message: "include must be an array of paths".into(),
            })
        }
    };
    let mut merged = Table::new();
    for inc in includes {
        let sub = load_table(&origin.join(&inc), stack)?;
        merge(&mut merged, sub);
    }
    merge(&mut merged, table);
    Ok(merged)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    name: String,
    surface: Surface,
    duration: f64,
    dt: Option<f64>,
    #[serde(default)]
    cut_on_touchdown: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ControlKind {
    OpenLoop,
    ClosedLoop,
}

/// One open-loop drive key. `amplitude` and `second_harmonic` apply to both
/// wings unless `left` or `right` override them.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriveKeyFile {
    time: f64,
    frequency: f64,
    #[serde(default)]
    amplitude: f64,
    #[serde(default)]
    second_harmonic: f64,
    left: Option<WingCommand>,
    right: Option<WingCommand>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlFile {
    kind: ControlKind,
    frequency: Option<f64>,
    gains: Option<ControllerGains>,
    limits: Option<ControllerLimits>,
    #[serde(default)]
    setpoints: Vec<SetpointKey>,
    #[serde(default)]
    drive: Vec<DriveKeyFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[allow(dead_code)]
    schema_version: i64,
    scenario: Header,
    #[serde(default)]
    initial: InitialState,
    #[serde(default)]
    sensor: SensorConfig,
    #[serde(default)]
    physics: Physics,
    control: ControlFile,
}

fn control_from_file(c: ControlFile, out: &mut Vec<String>) -> Control {
    match c.kind {
        ControlKind::OpenLoop => {
            if !c.setpoints.is_empty() || c.gains.is_some() || c.limits.is_some() || c.frequency.is_some() {
                out.push("control: open_loop takes only `drive` keys".into());
            }
            let keys = c
                .drive
                .into_iter()
                .map(|k| {
                    let both = WingCommand {
                        amplitude: k.amplitude,
                        second_harmonic: k.second_harmonic,
                    };
                    DriveKey {
                        time: k.time,
                        drive: DriveCommand {
                            frequency: k.frequency,
                            left: k.left.unwrap_or(both),
                            right: k.right.unwrap_or(both),
                        },
                    }
                })
                .collect();
            Control::OpenLoop(keys)
        }
        ControlKind::ClosedLoop => {
            if !c.drive.is_empty() {
                out.push("control: closed_loop does not take `drive` keys".into());
            }
            Control::ClosedLoop(ClosedLoop {
                gains: c.gains.unwrap_or_default(),
                limits: c.limits.unwrap_or_default(),
                frequency: c.frequency.unwrap_or(FLIGHT_FREQUENCY),
                setpoints: c.setpoints,
            })
        }
    }
}

/// Builds a scenario from an already merged table. Every violation is
/// reported, not just the first.
pub fn scenario_from_table(origin: &Origin, table: Table) -> Result<Scenario> {
    let file: ScenarioFile = ScenarioFile::deserialize(table).map_err(|e| Error::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    let mut problems = Vec::new();
    let control = control_from_file(file.control, &mut problems);
    let sc = Scenario {
        name: file.scenario.name,
        surface: file.scenario.surface,
        initial: file.initial,
        control,
        duration: file.scenario.duration,
        dt: file.scenario.dt.unwrap_or(DEFAULT_STEP),
        sensor: file.sensor,
        physics: file.physics,
        cut_on_touchdown: file.scenario.cut_on_touchdown,
    };
    if sc.name.trim().is_empty() {
        problems.push("scenario.name: must not be empty".into());
    }
    problems.extend(sc.violations());
    if problems.is_empty() {
        Ok(sc)
    } else {
        Err(Error::Invalid(problems))
    }
}

/// Loads, merges and validates a scenario.
pub fn load(origin: &Origin) -> Result<Scenario> {
    let table = load_table(origin, &mut BTreeSet::new())?;
    scenario_from_table(origin, table)
}

/// Parses scenario text; includes name bundled files.
pub fn from_str(text: &str) -> Result<Scenario> {
    let origin = Origin::Bundled("<inline>".into());
    let table = text.parse::<Table>().map_err(|e| Error::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    let merged = resolve(&origin, table, &mut BTreeSet::from([origin.clone()]))?;
    scenario_from_table(&origin, merged)
}

/// Command-line overrides applied after loading.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, sc: &mut Scenario) -> Result<()> {
        if let Some(seed) = self.seed {
            sc.sensor.seed = seed;
        }
        if let Some(dt) = self.dt {
            sc.dt = dt;
        }
        sc.validate().map_err(Error::from)
    }
}
