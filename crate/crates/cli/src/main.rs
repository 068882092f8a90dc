//! `gqit`: batch front end for the Gaussian quantum information toolkit.

mod commands;
mod literal;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gqit_core::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(Error::InvalidArgument(_)) => 1,
            CliError::Input(_)
            | CliError::Core(Error::InvalidState(_) | Error::Unphysical(_) | Error::InvalidTransform(_)) => 2,
            CliError::Core(Error::NumericalFailure(_) | Error::DegenerateInput(_)) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gqit",
    version,
    about = "Gaussian continuous-variable quantum information toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file (standard output if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tabular results; other results are always JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A state given either as a JSON file or an inline literal.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct StateInput {
    /// State JSON file.
    #[arg(long = "in")]
    path: Option<PathBuf>,
    /// Inline state: vacuum:N, coherent:RE+IMi, thermal:NBAR, squeezed:R, tmss:R.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build, inspect or transform states.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
    /// Separability and entanglement tests.
    Entangle {
        #[command(subcommand)]
        action: EntangleAction,
    },
    /// Gaussian channels and lossy-channel capacity.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Teleportation through a two-mode squeezed resource.
    Teleport {
        /// Resource squeezing.
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        state: StateInput,
        /// Monte-Carlo shots for a shot-by-shot consistency check.
        #[arg(long, requires = "seed")]
        shots: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dense coding with a two-mode squeezed resource.
    Densecode {
        #[arg(long)]
        r: f64,
    },
    /// Detector model and decoy-state analysis.
    Qkd {
        #[command(subcommand)]
        action: QkdAction,
    },
    /// Displaced-thermal estimation figures.
    Estimate {
        /// Thermal photon number.
        #[arg(long)]
        nbar: f64,
        /// Number of copies.
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// True amplitude for the Monte-Carlo run.
        #[arg(long, default_value = "0+0i")]
        zeta: String,
        /// Prior photon number for the Bayes figures.
        #[arg(long)]
        prior: Option<f64>,
        /// Monte-Carlo trials of the heterodyne estimator.
        #[arg(long, requires = "seed")]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parameter sweeps emitting one CSV row per grid point.
    Sweep {
        #[command(subcommand)]
        action: SweepAction,
    },
}

#[derive(Subcommand)]
pub enum StateAction {
    /// Write a state document from an inline literal.
    Build {
        /// Inline state literal.
        literal: String,
    },
    /// Physicality, spectrum, entropy and photon numbers.
    Info {
        #[command(flatten)]
        state: StateInput,
    },
    /// Keep a subset of modes.
    Reduce {
        #[command(flatten)]
        state: StateInput,
        /// Comma-separated modes to keep.
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    /// Symplectic-form check of a transform file and its action on a state.
    Transform {
        #[command(flatten)]
        state: StateInput,
        /// Transform JSON `{"matrix": rows, "shift": vector}`.
        #[arg(long)]
        transform: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum EntangleAction {
    /// PPT, Simon, Giedke and distillability verdicts.
    Check {
        #[command(flatten)]
        state: StateInput,
        /// Number of leading modes held by the first party.
        #[arg(long, default_value_t = 1)]
        split: usize,
    },
    /// Standard form of a two-mode state.
    StandardForm {
        #[command(flatten)]
        state: StateInput,
    },
    /// Symmetrize an NPPT two-mode state.
    Symmetrize {
        #[command(flatten)]
        state: StateInput,
    },
    /// Class of a three-mode state.
    Classify {
        #[command(flatten)]
        state: StateInput,
    },
}

#[derive(Subcommand)]
pub enum ChannelAction {
    /// Apply a channel file to a state.
    Apply {
        #[command(flatten)]
        state: StateInput,
        /// Channel JSON: `{"X", "Y"}` or `{"kind": "thermal", "eta", "nbar"}`.
        #[arg(long)]
        channel: PathBuf,
    },
    /// Capacity of parallel lossy channels under a total photon budget.
    Capacity {
        /// Comma-separated transmissivities.
        #[arg(long, value_delimiter = ',', required = true)]
        eta: Vec<f64>,
        /// Total mean photon number.
        #[arg(long)]
        energy: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct DecoyArgs {
    /// Signal intensity.
    #[arg(long)]
    pub mu: f64,
    /// Decoy intensity.
    #[arg(long = "mu-prime")]
    pub mu_prime: f64,
    /// Pulses per intensity for finite-size bounds.
    #[arg(long)]
    pub pulses: Option<f64>,
}

#[derive(Subcommand)]
pub enum QkdAction {
    /// Simulated decoy-state key rate as CSV.
    Keyrate {
        #[command(flatten)]
        decoy: DecoyArgs,
        /// Detector JSON; otherwise `--eta` and `--dark` describe the link.
        #[arg(long, conflicts_with_all = ["eta", "dark", "visibility"])]
        detector: Option<PathBuf>,
        /// Overall transmittance.
        #[arg(long, required_unless_present = "detector")]
        eta: Option<f64>,
        /// Dark-count probability.
        #[arg(long, default_value_t = 0.0)]
        dark: f64,
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
        /// Fiber length in km (with `--detector`).
        #[arg(long, default_value_t = 0.0)]
        length: f64,
    },
    /// Tagged-fraction bounds for an observation file.
    Bounds {
        /// Observation JSON (counts or rates).
        #[arg(long = "in")]
        path: PathBuf,
        /// Pulses per intensity; defaults to the counts in the file.
        #[arg(long)]
        pulses: Option<f64>,
    },
    /// Error rate at a given fiber length.
    Qber {
        #[arg(long)]
        detector: PathBuf,
        #[arg(long)]
        length: f64,
        /// Coherent source intensity; single photons if omitted.
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Largest length with error rate below a threshold.
    Distance {
        #[arg(long)]
        detector: PathBuf,
        #[arg(long, default_value_t = 0.11)]
        threshold: f64,
        #[arg(long)]
        mu: Option<f64>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Grid {
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
    /// First row index to emit, for resuming an interrupted sweep.
    #[arg(long, default_value_t = 0)]
    pub start_row: usize,
}

#[derive(Subcommand)]
pub enum SweepAction {
    /// Teleportation fidelity over the squeezing `r`.
    Teleport {
        #[command(flatten)]
        grid: Grid,
    },
    /// Dense-coding and single-mode capacities over the squeezing `r`.
    Densecode {
        #[command(flatten)]
        grid: Grid,
    },
    /// Key rate over fiber length in km.
    Keyrate {
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        decoy: DecoyArgs,
        #[arg(long)]
        detector: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let sink = output::Sink::new(cli.out, cli.format);
    match commands::run(cli.command, &sink) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gqit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
