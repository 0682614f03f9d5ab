use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use propdisc_cli::{export, run, Command, ConfigError, OutputLock, Params, RunConfig, EXIT_INVALID};

#[derive(Parser)]
#[command(name = "propdisc", version, about = "Proper holomorphic discs by boundary lifting")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Args {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand)]
enum Sub {
    /// Proper disc in {ρ_c > 0} by stages of cone lifts.
    Cone(Args),
    /// Axis-avoiding disc by stages of ρ_max lifts.
    Tube(Args),
    /// One cone lift of h.
    Lift(Args),
    /// Boundary diagnostics of h₁.
    Diagnose(Args),
    /// Lifting radius a(c) and its check on fresh points.
    Oracle(Args),
}

fn resolve(cli: Cli) -> Result<RunConfig, ConfigError> {
    let (command, args) = match cli.command {
        Sub::Cone(a) => (Command::Cone, a),
        Sub::Tube(a) => (Command::Tube, a),
        Sub::Lift(a) => (Command::Lift, a),
        Sub::Diagnose(a) => (Command::Diagnose, a),
        Sub::Oracle(a) => (Command::Oracle, a),
    };
    let params = match &args.config {
        Some(p) => args.params.over(Params::from_file(p)?),
        None => args.params,
    };
    RunConfig::resolve(command, params)
}

fn main() -> ExitCode {
    let cfg = match resolve(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let lock = match &cfg.out {
        Some(dir) => match OutputLock::acquire(dir) {
            Ok(l) => Some(l),
            Err(e) => {
                eprintln!("error: invalid out: {}: {e}", dir.display());
                return ExitCode::from(EXIT_INVALID as u8);
            }
        },
        None => None,
    };
    let artifacts = run(&cfg);
    for line in &artifacts.summary {
        println!("{line}");
    }
    if let Some(lock) = &lock {
        match export(&artifacts, lock) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: invalid out: {}: {e}", lock.dir().display());
                return ExitCode::from(EXIT_INVALID as u8);
            }
        }
    }
    if artifacts.partial {
        println!("partial: true");
    }
    ExitCode::from(artifacts.exit_code() as u8)
}
