use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stark_core::cli::{self, CliError, Command, RunConfig};

#[derive(Parser)]
#[command(name = "stark", version, about = "Resonances of a localized defect in a uniform field")]
struct Args {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Locate the resonance pole and its residues.
    Pole { config: PathBuf },
    /// Survival amplitude by contour, pole and grid oracle.
    Survival { config: PathBuf },
    /// S-matrix on a real-axis scan.
    Smatrix { config: PathBuf },
    /// Track the pole across field strengths.
    Scan { config: PathBuf },
    /// Resonance line shape.
    Profile { config: PathBuf },
    /// Validate and re-adjudicate the conventions ledger.
    Selftest { config: Option<PathBuf> },
}

fn execute(sub: Sub) -> Result<(), CliError> {
    cli::configure_threads(std::env::var("STARK_THREADS").ok().as_deref())?;
    let (command, path) = match sub {
        Sub::Pole { config } => (Command::Pole, config),
        Sub::Survival { config } => (Command::Survival, config),
        Sub::Smatrix { config } => (Command::Smatrix, config),
        Sub::Scan { config } => (Command::Scan, config),
        Sub::Profile { config } => (Command::Profile, config),
        Sub::Selftest { config } => {
            let config = config.map(|p| RunConfig::load(&p)).transpose()?;
            let (checks, written) = cli::cmd_selftest(config.as_ref())?;
            for c in checks {
                println!("{:<20} {}  {}", c.key, if c.passed { "ok" } else { "FAILED" }, c.detail);
            }
            for p in written {
                println!("wrote {}", p.display());
            }
            return Ok(());
        }
    };
    let config = RunConfig::load(&path)?;
    config.params()?;
    for p in cli::run(command, &config)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stark: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
