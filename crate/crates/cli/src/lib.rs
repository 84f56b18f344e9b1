//! `nlheat`: single runs, table sweeps, Green function data and temporal
//! convergence studies for the nonlinear heat conduction integrators.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<nlheat_core::Error> for CliError {
    fn from(e: nlheat_core::Error) -> Self {
        use nlheat_core::Error as E;
        match e {
            E::Config(_) | E::Dimension { .. } | E::Domain(_) | E::Contract(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nlheat",
    version,
    about = "Backward Euler and exponential Euler for u_t = div(k0 u^sigma grad u) + g"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory for reports and plot data.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Nonlinear tolerance (overrides the config file).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Backward Euler inner solver: cg or cheb:N.
    #[arg(long, global = true)]
    pub inner: Option<String>,
    /// Leave the wall_time column empty so repeated sweeps are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One simulation from a key = value config file.
    Run { config: PathBuf },
    /// Sweep grids x time steps x schemes of a benchmark case.
    Table {
        case: String,
        /// Comma-separated grids, e.g. 128,256 or 64x64; empty for none.
        #[arg(long)]
        grids: Option<String>,
        /// Comma-separated time steps; empty for none.
        #[arg(long)]
        dts: Option<String>,
    },
    /// Green function data for both schemes at dt = T and dt = T/1000.
    Green,
    /// Temporal errors against a fine explicit reference on a small grid.
    Convergence {
        case: String,
        #[arg(long)]
        grids: Option<String>,
        #[arg(long)]
        dts: Option<String>,
    },
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")));
        }
    }
    let inner = cli.inner.as_deref().map(config::InnerChoice::parse).transpose()?;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    let opts = commands::Options { out: cli.out.clone(), tol: cli.tol, inner, timing: !cli.no_timing };
    match &cli.command {
        Command::Run { config } => commands::run(config, &opts),
        Command::Table { case, grids, dts } => commands::table(case, grids.as_deref(), dts.as_deref(), &opts),
        Command::Green => commands::green(&opts),
        Command::Convergence { case, grids, dts } => {
            commands::convergence(case, grids.as_deref(), dts.as_deref(), &opts)
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlheat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
