use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use stark_spectra::config::{parse_config, Mode};
use stark_spectra::modes::run;

/// Spectral analysis of the quantum Rabi-Stark model: parameter sweeps,
/// G-function roots, critical-point analytics and cross-validation reports.
#[derive(Parser)]
#[command(name = "stark-spectra", version, about)]
struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    mode: Mode,
    /// Run configuration (flat key = value with [section] headers).
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides [output] path from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to STARK_SPECTRA_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("STARK_SPECTRA_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read config {}: {e}", cli.config.display());
            return ExitCode::from(4);
        }
    };
    let config = match parse_config(&text, cli.mode, cli.out) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };

    let outcome = match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&config)),
            Err(e) => {
                eprintln!("cannot build thread pool: {e}");
                return ExitCode::from(2);
            }
        },
        _ => run(&config),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
