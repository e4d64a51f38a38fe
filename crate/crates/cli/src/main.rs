use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ntqpt_cli::{execute, load, resolve, Command, Overrides, EXIT_CONFIG, EXIT_OK, EXIT_TASK_FAILED};

#[derive(Parser)]
#[command(name = "ntqpt", version, about = "Quench sweeps, spectra and finite-size exponents")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Parity-resolved spectrum, doublet pairing and precursor estimate.
    Spectrum(Flags),
    /// Quenches at the given initial couplings or reduced energies.
    Quench(Flags),
    /// Order-parameter curves over a grid, for every size.
    Sweep(Flags),
    /// ζ, ν and β from finite-size scaling.
    Exponents(Flags),
    /// Brute-force oracle and symmetry checks.
    Validate(Flags),
}

#[derive(Args)]
struct Flags {
    /// Run file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in run file.
    #[arg(long)]
    preset: Option<String>,
    /// Worker threads; defaults to all cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Spectrum cache directory.
    #[arg(long, env = "NTQPT_CACHE")]
    cache: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Sub::Spectrum(f) => (Command::Spectrum, f),
        Sub::Quench(f) => (Command::Quench, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::Exponents(f) => (Command::Exponents, f),
        Sub::Validate(f) => (Command::Validate, f),
    };
    let (config, source) = match load(command, flags.config.as_deref(), flags.preset.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let overrides = Overrides {
        workers: flags.workers.map(|w| w as usize),
        cache: flags.cache,
        out: flags.out,
    };
    let config = resolve(config, &overrides);
    match execute(&config, &source) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", config.output.join(&f.file).display());
            }
            if outcome.failures > 0 {
                eprintln!("{} task(s) failed; see the failures file", outcome.failures);
                ExitCode::from(EXIT_TASK_FAILED as u8)
            } else {
                ExitCode::from(EXIT_OK as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_TASK_FAILED as u8)
        }
    }
}
