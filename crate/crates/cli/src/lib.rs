//! Command-line driver for `lorentz-wire-core`.
//!
//! A run resolves a [`RunConfig`] from an optional JSON file and the command
//! line flags, executes one subcommand, writes its files atomically into the
//! output directory and finishes with `<subcommand>.manifest.json`, which
//! echoes the resolved configuration and can be passed back to `--config`.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use config::RunConfig;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "lorentz-wire",
    version,
    about = "Charged particle near a modulated current-carrying wire"
)]
pub struct Cli {
    /// JSON configuration, or a manifest from an earlier run
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the equilibrium radius, its energy and the minimal periods
    Equilibrium,
    /// Tabulate the period T(H) of the unperturbed orbits
    PeriodMap {
        /// Largest energy of the table
        #[arg(long)]
        hmax: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Quadrature tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Tabulate the retarded vector potential of the modulation
    Potential {
        /// Number of radii
        #[arg(long)]
        points: Option<usize>,
        /// Quadrature tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Subharmonic Melnikov function of resonance order n
    Melnikov {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Locate the periodic orbits of the forced system for n = 1..=nmax
    FindOrbits {
        #[arg(long)]
        nmax: Option<usize>,
        /// Modulation amplitude
        #[arg(long)]
        k: Option<f64>,
        /// Newton closure tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Integrate one trajectory of the forced system
    Simulate {
        /// Number of output samples
        #[arg(long)]
        points: Option<usize>,
        /// Modulation amplitude
        #[arg(long)]
        k: Option<f64>,
        /// Integration tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the reconstructed three-dimensional motion
        #[arg(long)]
        full: bool,
    },
    /// Run the sign checks of the monotonicity argument
    Verify {
        /// Sign tolerance, relative to the local magnitude
        #[arg(long)]
        tol: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::PeriodMap { .. } => "period-map",
            Command::Potential { .. } => "potential",
            Command::Melnikov { .. } => "melnikov",
            Command::FindOrbits { .. } => "find-orbits",
            Command::Simulate { .. } => "simulate",
            Command::Verify { .. } => "verify",
        }
    }

    /// Folds the flags into `cfg`.
    fn apply(&self, cfg: &mut RunConfig) {
        fn set<T: Copy>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        match *self {
            Command::Equilibrium => {}
            Command::PeriodMap { hmax, points, tol } => {
                if hmax.is_some() {
                    cfg.period_map.h_max = hmax;
                }
                set(&mut cfg.period_map.points, points);
                set(&mut cfg.tolerances.quadrature, tol);
            }
            Command::Potential { points, tol } => {
                set(&mut cfg.potential.points, points);
                set(&mut cfg.tolerances.quadrature, tol);
            }
            Command::Melnikov { n } => set(&mut cfg.melnikov.n, n),
            Command::FindOrbits { nmax, k, tol } => {
                set(&mut cfg.orbits.n_max, nmax);
                set(&mut cfg.orbits.k, k);
                set(&mut cfg.tolerances.newton, tol);
            }
            Command::Simulate {
                points,
                k,
                tol,
                full,
            } => {
                set(&mut cfg.simulate.points, points);
                set(&mut cfg.params.modulation, k);
                set(&mut cfg.tolerances.integration, tol);
                cfg.simulate.full |= full;
            }
            Command::Verify { tol } => set(&mut cfg.verify.tol, tol),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    manifest_version: u32,
    generator: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    outputs: Vec<String>,
}

/// Configuration from the file (or the defaults) with the flags applied.
pub fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let cwd = std::env::current_dir().map_err(|e| CliError::Config(e.to_string()))?;
    let (mut cfg, base) = match &cli.config {
        Some(path) => {
            let cfg = RunConfig::load(path)?;
            let base = match path.parent() {
                Some(dir) if !dir.as_os_str().is_empty() => cwd.join(dir),
                _ => cwd,
            };
            (cfg, base)
        }
        None => (RunConfig::default(), cwd),
    };
    cfg.field.resolve_paths(&base);
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    cli.command.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

/// Resolves the configuration, runs the subcommand and writes the manifest.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = resolve_config(cli)?;
    let outcome = match cli.command {
        Command::Equilibrium => commands::equilibrium_cmd(&cfg),
        Command::PeriodMap { .. } => commands::period_map_cmd(&cfg),
        Command::Potential { .. } => commands::potential_cmd(&cfg),
        Command::Melnikov { .. } => commands::melnikov_cmd(&cfg),
        Command::FindOrbits { .. } => commands::find_orbits_cmd(&cfg),
        Command::Simulate { .. } => commands::simulate_cmd(&cfg),
        Command::Verify { .. } => commands::verify_cmd(&cfg),
    }?;
    let name = cli.command.name();
    let manifest = Manifest {
        manifest_version: 1,
        generator: concat!("lorentz-wire ", env!("CARGO_PKG_VERSION")),
        command: name,
        config: &cfg,
        outputs: outcome
            .outputs
            .iter()
            .filter_map(|p| p.file_name())
            .map(|f| f.to_string_lossy().into_owned())
            .collect(),
    };
    io::write_atomic(
        &cfg.output.dir,
        &format!("{name}.manifest.json"),
        &io::to_json(&manifest)?,
    )?;
    match outcome.failures {
        0 => Ok(()),
        n => Err(CliError::VerifyFailed(n)),
    }
}

/// Parses `argv` (program name first), runs it and returns the exit status:
/// 0 on success, 2 for usage errors and [`CliError::exit_code`] otherwise.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lorentz-wire: error: {e}");
            e.exit_code()
        }
    }
}
