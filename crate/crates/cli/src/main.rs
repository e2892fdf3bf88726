//! `impduff`: runs experiments described by scenario files and writes
//! CSV/JSON results plus a manifest into an output directory.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;
use impulsive_duffing::scenario::Scenario;
use output::{sha256_hex, Output, RunInfo};

#[derive(Parser)]
#[command(name = "impduff", version, about = "Experiments on impulsive Duffing oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the initial value problem and write the trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Extra sample times added to the uniform grid.
        #[arg(long = "at", value_name = "T")]
        at: Vec<f64>,
    },
    /// Iterate the time-1 map from the initial point, or from every grid
    /// point when --grid is given.
    Poincare(Common),
    /// Jacobian determinant of the time-1 map on the area grid.
    AreaCheck(Common),
    /// Self-test of the action-angle chart.
    AaRoundtrip(Common),
    /// Smoothing error against the smoothing scale on a lacunary signal.
    SmoothRate(Common),
    /// Rotation numbers and twist along the seed ladder.
    Rotation(Common),
    /// Long-horizon boundedness sweep over the grid.
    Sweep(Common),
    /// Invariant-circle detection along the seed ladder.
    Detect(Common),
}

#[derive(Args, Clone)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory.
    #[arg(long, env = "IMPDUFF_OUT", default_value = "impduff-out")]
    pub out: PathBuf,
    /// Number of map iterates (or sample count for `simulate`).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Points per grid side (or ladder length for `rotation`/`detect`).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Relative integration tolerance; the absolute one is 1e-2 times it.
    /// For `aa-roundtrip` this is the chart tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Simulate { common, .. } => ("simulate", common),
            Command::Poincare(c) => ("poincare", c),
            Command::AreaCheck(c) => ("area-check", c),
            Command::AaRoundtrip(c) => ("aa-roundtrip", c),
            Command::SmoothRate(c) => ("smooth-rate", c),
            Command::Rotation(c) => ("rotation", c),
            Command::Sweep(c) => ("sweep", c),
            Command::Detect(c) => ("detect", c),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common) = cli.command.parts();
    if let Some(threads) = common.threads {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    let bytes = std::fs::read(&common.scenario).map_err(|e| CliError::io(&common.scenario, e))?;
    let mut scenario = Scenario::load(&common.scenario)?;
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(tol) = common.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Validation(format!("--tol must be positive, got {tol}")));
        }
        if name != "aa-roundtrip" {
            scenario.tolerances = impulsive_duffing::ode::Tolerances::new(tol, 1e-2 * tol);
        }
    }
    let info = RunInfo {
        scenario: scenario.name.clone(),
        scenario_sha256: sha256_hex(&bytes),
        subcommand: name,
        rtol: scenario.tolerances.rtol,
        atol: scenario.tolerances.atol,
        escape_radius: if name == "simulate" {
            commands::IVP_ESCAPE_RADIUS
        } else {
            scenario.escape_radius
        },
    };
    let mut out = Output::new(&common.out, info)?;
    let result = match &cli.command {
        Command::Simulate { common, at } => commands::simulate(&scenario, common, at, &mut out),
        Command::Poincare(c) => commands::poincare(&scenario, c, &mut out),
        Command::AreaCheck(c) => commands::area_check(&scenario, c, &mut out),
        Command::AaRoundtrip(c) => commands::aa_roundtrip(&scenario, c, &mut out),
        Command::SmoothRate(c) => commands::smooth_rate(&scenario, c, &mut out),
        Command::Rotation(c) => commands::rotation(&scenario, c, &mut out),
        Command::Sweep(c) => commands::sweep(&scenario, c, &mut out),
        Command::Detect(c) => commands::detect(&scenario, c, &mut out),
    };
    match result {
        Ok(()) => out.finish(true),
        Err(e) => {
            out.finish(false)?;
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("impduff: {e}");
            e.exit_code()
        }
    }
}
