//! `zitterlab` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zitterlab::experiment::{run_scenario, run_sweep, verify_gauge, ScenarioConfig, PRESETS};
use zitterlab::gauge::LaserConfig;
use zitterlab::Error;

#[derive(Parser)]
#[command(name = "zitterlab", version, about = "Driven Zitterbewegung simulator")]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its time series and summary.
    Run {
        /// Preset name or path to a key = value config file.
        scenario: String,
        /// Override a config key, e.g. --set v_d=30.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(short, long, value_name = "DIR")]
        output: PathBuf,
    },
    /// Run a (v_d, omega_d) grid over a base scenario.
    Sweep {
        scenario: String,
        /// Drive velocities: comma list or start:stop:count.
        #[arg(long, value_name = "LIST")]
        v_d: String,
        /// Drive frequencies: comma list or start:stop:count.
        #[arg(long, value_name = "LIST", default_value = "50")]
        omega_d: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Worker threads; defaults to the global pool.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(short, long, value_name = "DIR")]
        output: PathBuf,
    },
    /// Check the dark-state field-strength spectrum against ±2.
    VerifyGauge {
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Mixing angle; defaults to arccos(√2 − 1).
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 1.0)]
        k_l: f64,
        #[arg(short, long, value_name = "DIR")]
        output: PathBuf,
    },
    /// List the built-in presets.
    ListPresets,
    /// Print the config record of a preset or config file.
    ShowConfig {
        scenario: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn load_config(scenario: &str, overrides: &[String]) -> Result<ScenarioConfig, Error> {
    let mut cfg = if ScenarioConfig::is_preset(scenario) {
        ScenarioConfig::preset(scenario)?
    } else {
        let path = Path::new(scenario);
        let text = fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::Config(format!("'{scenario}' is neither a preset nor a readable config file"))
            } else {
                Error::Io { path: path.to_path_buf(), source: e }
            }
        })?;
        ScenarioConfig::parse(&text)?
    };
    cfg.apply_overrides(overrides)?;
    Ok(cfg)
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    let num = |t: &str| {
        t.trim().parse::<f64>().map_err(|_| Error::Config(format!("'{t}' is not a number in list '{s}'")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let n: usize = count.trim().parse().map_err(|_| Error::Config(format!("bad count in range '{s}'")))?;
            let (a, b) = (num(start)?, num(stop)?);
            match n {
                0 => Err(Error::Config(format!("range '{s}' has zero points"))),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::Config(format!("list '{s}' must be a,b,c or start:stop:count"))),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { scenario, overrides, output } => {
            let s = load_config(&scenario, &overrides)?.build()?;
            let report = run_scenario(&s, &output)?;
            println!("{}", output.join(format!("{}.summary.txt", s.name)).display());
            print!("{}", report.to_summary(&s));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { scenario, v_d, omega_d, overrides, workers, output } => {
            let base = load_config(&scenario, &overrides)?;
            let result = run_sweep(&base, &parse_list(&v_d)?, &parse_list(&omega_d)?, &output, workers)?;
            print!("{}", result.to_csv());
            let failed = result.failures();
            if failed > 0 {
                for p in &result.points {
                    if let zitterlab::experiment::SweepStatus::Failed(msg) = &p.status {
                        eprintln!("v_d = {}, omega_d = {}: {msg}", p.v_d, p.omega_d);
                    }
                }
                eprintln!("{failed} sweep point(s) failed");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyGauge { points, xi, omega0, k_l, output } => {
            let cfg = LaserConfig::new(omega0, xi.unwrap_or(LaserConfig::default().xi), k_l)?;
            let check = verify_gauge(&cfg, points, &output)?;
            print!("{}", check.to_csv());
            if check.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                let w = check.worst;
                eprintln!(
                    "spectrum deviates from +/-2: worst point ({:.6}, {:.6}) has ({:.8}, {:.8}), deviation {:.3e}",
                    w.point[0], w.point[1], w.spectrum[0], w.spectrum[1], w.deviation
                );
                Ok(ExitCode::from(1))
            }
        }
        Command::ListPresets => {
            for (name, desc) in PRESETS {
                println!("{name:<14} {desc}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ShowConfig { scenario, overrides } => {
            let cfg = load_config(&scenario, &overrides)?;
            cfg.build()?;
            print!("{}", cfg.to_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
