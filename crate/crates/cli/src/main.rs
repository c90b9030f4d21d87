//! `steerlab` — steerability analysis for two-qubit states.
//!
//! Subcommands:
//!
//! * `classify`   — decide a state: separable, steerable (Bell diagonal),
//!   certified unsteerable, or undetermined.
//! * `boundary`   — scale a correlation direction onto the unsteerable
//!   boundary.
//! * `verify-lhs` — build an LHS model and report its requirement residuals.
//! * `simulate`   — run the hidden-state protocol and compare the empirical
//!   assemblage with the quantum one.
//! * `figure1`    — sweep maximal Bloch lengths over the axial families and
//!   emit CSV plus a JSON sidecar.
//!
//! Exit codes: 0 = verdict computed, 2 = input/usage error, 3 = model
//! construction failed.

mod commands;
mod schema;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::ModelSelection;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Shared run configuration, echoed into every report.
pub struct RunSettings {
    pub order: usize,
    pub grid_points: usize,
    pub shots: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub format: Format,
}

#[derive(Debug)]
pub struct CliError {
    message: String,
    exit: u8,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        Self { message, exit: 2 }
    }

    pub fn construction(message: String) -> Self {
        Self { message, exit: 3 }
    }
}

#[derive(Parser)]
#[command(
    name = "steerlab",
    version,
    about = "Steerability analysis and local-hidden-state models for two-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Quadrature order for sphere and zone integrals.
    #[arg(long, global = true, default_value_t = 64)]
    order: usize,

    /// Coarse lattice size for maximizations over the sphere.
    #[arg(long = "grid-points", global = true, default_value_t = 4096)]
    grid_points: usize,

    /// Shots per direction for `simulate`.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    shots: u64,

    /// Seed for all pseudo-random draws; identical seeds reproduce outputs
    /// byte for byte.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Residual tolerance for pass/fail judgements.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,

    /// Write the report here instead of stdout (required for figure1).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format; figure1 always writes CSV with a JSON sidecar.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a state file.
    Classify {
        /// JSON state file: {"a": [..], "T": [..]} or {"rho": [[[re,im],..],..]}.
        #[arg(long)]
        state: String,
    },
    /// Critical visibility along a correlation direction.
    Boundary {
        /// Correlation direction Tx,Ty,Tz.
        #[arg(long = "T", allow_hyphen_values = true)]
        t_dir: String,
    },
    /// Verify the four LHS-model requirements by quadrature.
    VerifyLhs {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of probe directions.
        #[arg(long, default_value_t = 100)]
        probes: usize,
    },
    /// Monte Carlo run of the hidden-state protocol.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Probe direction x,y,z (repeatable); defaults to the three axes.
        #[arg(long = "x", allow_hyphen_values = true)]
        directions: Vec<String>,
    },
    /// Maximal-Bloch-length sweep over an axial family.
    Figure1 {
        /// Panel: 'a' (|Tx|=|Ty|=1/2, Bloch along z) or 'b' (|Tz|=1/2, along x).
        #[arg(long)]
        panel: String,
        /// Abscissa count over (0, 1/2].
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// State file; the model is constructed for this state.
    #[arg(long)]
    state: Option<String>,
    /// Explicit model family: werner | bell-diagonal | canonical.
    #[arg(long)]
    model: Option<String>,
    /// Response weight for the werner model.
    #[arg(long)]
    q: Option<f64>,
    /// Boundary correlation matrix Tx,Ty,Tz (or 'iso' for the isotropic one).
    #[arg(long = "T0", allow_hyphen_values = true)]
    t0: Option<String>,
    /// Visibility for the canonical model.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Alice Bloch vector ax,ay,az for the canonical model.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
}

impl ModelArgs {
    fn selection(&self) -> ModelSelection {
        ModelSelection {
            state: self.state.clone(),
            model: self.model.clone(),
            q: self.q,
            t0: self.t0.clone(),
            t: self.t,
            a: self.a.clone(),
        }
    }
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            std::io::stdout()
                .flush()
                .map_err(|e| CliError::usage(format!("cannot write to stdout: {e}")))
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.order < 4 {
        return Err(CliError::usage("--order must be at least 4".to_string()));
    }
    if cli.grid_points < 16 {
        return Err(CliError::usage(
            "--grid-points must be at least 16".to_string(),
        ));
    }
    let settings = RunSettings {
        order: cli.order,
        grid_points: cli.grid_points,
        shots: cli.shots,
        seed: cli.seed,
        tolerance: cli.tolerance,
        format: cli.format,
    };

    match &cli.command {
        Command::Classify { state } => {
            let text = commands::cmd_classify(state, &settings)?;
            write_output(&text, cli.out.as_deref())
        }
        Command::Boundary { t_dir } => {
            let text = commands::cmd_boundary(t_dir, &settings)?;
            write_output(&text, cli.out.as_deref())
        }
        Command::VerifyLhs { model, probes } => {
            let text = commands::cmd_verify_lhs(&model.selection(), *probes, &settings)?;
            write_output(&text, cli.out.as_deref())
        }
        Command::Simulate { model, directions } => {
            let text = commands::cmd_simulate(&model.selection(), directions, &settings)?;
            write_output(&text, cli.out.as_deref())
        }
        Command::Figure1 { panel, samples } => {
            let out = cli.out.as_deref().ok_or_else(|| {
                CliError::usage("figure1 requires --out <file.csv>".to_string())
            })?;
            let result = commands::cmd_figure1(
                panel,
                *samples,
                &out.display().to_string(),
                &settings,
            )?;
            write_output(&result.csv, Some(out))?;
            let sidecar_path = out.with_extension("json");
            write_output(&result.sidecar, Some(&sidecar_path))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.exit)
        }
    }
}
