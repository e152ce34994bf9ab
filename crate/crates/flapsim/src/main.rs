use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flapsim::config::{self, Origin, Overrides};
use flapsim::output::run_to_dir;
use flapsim::report;
use flapsim::{bundled, Error, Result, OUT_ENV};
use flapsim_core::hydrostatics::{LegGeometry, WaterProperties};
use flapsim_core::plant::Physics;
use flapsim_core::scenario::clearance_check;

/// Simulator for an insect-scale flapping-wing robot that flies, walks on the
/// ground and skims over water.
///
/// Exit status: 0 on success, 1 for configuration errors, 2 when the
/// integration produced a non-finite state.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output root; each run writes to <out>/<name>/
    #[arg(short, long, env = OUT_ENV, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario by name
    Run {
        /// Path to a scenario .toml, or a bundled name such as `hover`
        scenario: String,
        #[command(flatten)]
        out: OutArgs,
        /// Override the sensor noise seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the requested physics step (s)
        #[arg(long)]
        dt: Option<f64>,
        /// Print the summary as JSON
        #[arg(long)]
        json: bool,
    },
    /// List bundled scenarios
    List,
    /// Print a bundled file
    Show { name: String },
    /// Ground speed over an amplitude x frequency grid
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = [200.0, 225.0, 250.0])]
        amplitudes: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [40.0, 60.0, 80.0, 100.0, 120.0, 140.0])]
        frequencies: Vec<f64>,
        /// Second-harmonic ratio
        #[arg(long, default_value_t = 0.3)]
        mu: f64,
        /// Simulated time per cell (s)
        #[arg(long, default_value_t = 2.0)]
        duration: f64,
        #[arg(long)]
        json: bool,
        /// Also write sweep.csv under the output root
        #[arg(long)]
        save: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Leg sizing and flotation numbers
    Legs {
        /// Body mass (mg)
        #[arg(long, default_value_t = 80.0)]
        mass: f64,
        /// Total leg length (mm)
        #[arg(long, default_value_t = 50.0)]
        length: f64,
        #[arg(long)]
        json: bool,
    },
    /// Ground cost of transport, hover power and flight cost of transport
    Energy {
        #[arg(long, default_value_t = 250.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.3)]
        mu: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [60.0, 80.0, 100.0, 120.0])]
        frequencies: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        duration: f64,
        /// Flight scenario used for the airborne cost of transport
        #[arg(long, default_value = "flight-line")]
        flight: String,
        #[arg(long)]
        json: bool,
    },
    /// Check whether the robot fits under a gap (inclusive)
    Clearance {
        /// Gap height (mm)
        gap: f64,
    },
}

fn write_sweep_csv(path: &Path, r: &report::SweepReport) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["amplitude", "frequency", "speed", "mean_power", "liftoff_regime"])?;
    for c in &r.cells {
        w.write_record([
            c.amplitude.to_string(),
            c.frequency.to_string(),
            c.speed.map(|v| v.to_string()).unwrap_or_default(),
            c.mean_power.to_string(),
            c.liftoff_regime.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run {
            scenario,
            out,
            seed,
            dt,
            json,
        } => {
            let origin = Origin::resolve(&scenario)?;
            let mut sc = config::load(&origin)?;
            Overrides { seed, dt }.apply(&mut sc)?;
            let dir = out.out.join(&sc.name);
            let files = run_to_dir(&sc, &dir)?;
            let rec = flapsim::output::SummaryRecord::from(&files.summary);
            if json {
                println!("{}", serde_json::to_string_pretty(&rec)?);
            } else {
                print_summary(&rec);
                println!("logs          {}", files.dir.display());
            }
        }
        Command::List => {
            for n in bundled::scenario_names() {
                println!("{n}");
            }
        }
        Command::Show { name } => {
            let key = if name.ends_with(".toml") { name.clone() } else { format!("{name}.toml") };
            let text = bundled::get(&key).ok_or(Error::UnknownBundled(name))?;
            print!("{text}");
        }
        Command::Sweep {
            amplitudes,
            frequencies,
            mu,
            duration,
            json,
            save,
            out,
        } => {
            let r = report::sweep(&Physics::default(), &amplitudes, &frequencies, mu, duration)?;
            if save {
                write_sweep_csv(&out.out.join("sweep.csv"), &r)?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                println!("{r}");
            }
        }
        Command::Legs { mass, length, json } => {
            let r = report::legs(mass, length, &LegGeometry::default(), &WaterProperties::default());
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                print!("{r}");
            }
        }
        Command::Energy {
            amplitude,
            mu,
            frequencies,
            duration,
            flight,
            json,
        } => {
            let origin = Origin::resolve(&flight)?;
            let r = report::energy(&Physics::default(), amplitude, mu, &frequencies, duration, &origin)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                println!("{r}");
            }
        }
        Command::Clearance { gap } => {
            let c = clearance_check(&Physics::default().geometry, gap * 1e-3);
            println!(
                "gap {:.2} mm, robot {:.2} mm: {}",
                gap,
                c.bounding_height * 1e3,
                if c.passes { "pass" } else { "fail" }
            );
        }
    }
    Ok(())
}

fn print_summary(s: &flapsim::output::SummaryRecord) {
    println!("scenario      {}", s.name);
    println!("duration      {} s (step {:.3e} s)", s.duration, s.physics_step);
    let p = s.final_position;
    println!("final         ({:.4}, {:.4}, {:.4}) m, {}", p[0], p[1], p[2], s.final_mode);
    if let Some(l) = s.landing {
        println!("landing       {:?} at {:.3} m/s", l, s.touchdown_speed.unwrap_or(0.0));
    }
    if let Some(r) = s.rms_error {
        println!("rms error     ({:.2e}, {:.2e}, {:.2e}) m", r[0], r[1], r[2]);
    }
    println!("mean speed    {:.3} mm/s", s.mean_speed * 1e3);
    println!("yaw rate      {:.2} deg/s", s.mean_yaw_rate_deg);
    println!("energy        {:.4e} J (signed {:.4e})", s.rectified_energy, s.signed_energy);
    println!("mean power    {:.3} mW", s.mean_power * 1e3);
    match s.cost_of_transport.value() {
        Some(v) => println!("CoT           {v:.4} J/m"),
        None => println!("CoT           n/a"),
    }
    println!("saturations   {}", s.saturation_count);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
