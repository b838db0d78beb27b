//! Command-line driver for metriplectic rigid-body and heavy-top runs.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical
//! failure, 3 reproduction-tolerance failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod error;
mod output;
mod presets;

#[derive(Parser)]
#[command(
    name = "metriplectic",
    version,
    about = "Simulate and analyze dissipative rigid-body and heavy-top dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algebra {
    So3,
    HeavyTop,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run and emit CSV, plot script, and summary.
    Simulate {
        /// Path to a JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Linearize about an aligned equilibrium and report the spectrum.
    Linearize {
        /// Path to a JSON run configuration; the equilibrium is read from
        /// its `equilibrium` field or derived from `z0`.
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the curvature entries and bracket identities of an algebra.
    VerifyGeometry {
        /// Which algebra to verify.
        #[arg(value_enum)]
        algebra: Algebra,
        /// Seed for the random-state degeneracy probe.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run a canned experiment (fig1..fig7 or spectra) with checks.
    Reproduce {
        /// Preset id: fig1..fig7 or spectra.
        id: String,
        /// Output directory for emitted files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE by default, which turns `metriplectic ... | head`
    // into a broken-pipe panic; restore the conventional behavior.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Simulate { config } => commands::cmd_simulate(&config),
        Command::Linearize { config } => commands::cmd_linearize(&config),
        Command::VerifyGeometry { algebra, seed } => commands::cmd_verify_geometry(
            match algebra {
                Algebra::So3 => "so3",
                Algebra::HeavyTop => "heavy-top",
            },
            seed,
        ),
        Command::Reproduce { id, out } => commands::cmd_reproduce(&id, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
