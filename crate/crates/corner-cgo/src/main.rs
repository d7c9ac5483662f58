//! Thin CLI over the library runner:
//! `corner-cgo <subcommand> --config <path> [--out <dir>] [--serial] [--threads N]`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use corner_cgo::io::{load_config, run, Command};

#[derive(Debug, Clone, clap::Subcommand)]
enum Sub {
    /// Build a CGO solution and report residual/norm diagnostics.
    CgoBuild(CommonArgs),
    /// Sweep sector moments across the h-grid and fit the decay rate.
    RateSweep(CommonArgs),
    /// Tabulate the sharp constants and their vanishing flags.
    Constants(CommonArgs),
    /// Run the always-scattering decision procedure.
    Verdict(CommonArgs),
    /// Verify the rectangle non-scattering witness identities.
    Witness(CommonArgs),
    /// Run the tail-bound sweep, Cauchy inverse check, and operator trends.
    VerifyLemma(CommonArgs),
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_path).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force single-threaded execution.
    #[arg(long, default_value_t = false)]
    serial: bool,
    /// Worker thread count (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(name = "corner-cgo", version, about = "CGO corner-scattering experiments")]
struct Cli {
    #[command(subcommand)]
    sub: Sub,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.sub {
        Sub::CgoBuild(a) => (Command::CgoBuild, a),
        Sub::RateSweep(a) => (Command::RateSweep, a),
        Sub::Constants(a) => (Command::Constants, a),
        Sub::Verdict(a) => (Command::Verdict, a),
        Sub::Witness(a) => (Command::Witness, a),
        Sub::VerifyLemma(a) => (Command::VerifyLemma, a),
    };

    let mut config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    // the CLI subcommand is authoritative
    config.command = command;
    if let Some(out) = args.out {
        config.output_path = Some(out.to_string_lossy().into_owned());
    }
    if args.serial {
        config.threads = 1;
    } else if let Some(n) = args.threads {
        config.threads = n;
    }

    match run(&config) {
        Ok(manifest) => {
            println!(
                "{}: status {} ({} values, reports in {})",
                config.command.name(),
                manifest.status,
                manifest.values.len(),
                config.output_path.as_deref().unwrap_or("out")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
