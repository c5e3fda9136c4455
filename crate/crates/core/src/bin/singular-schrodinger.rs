//! `singular-schrodinger` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::Parser;

use singular_schrodinger::cli::run::metadata;
use singular_schrodinger::cli::{load_config, run, Command, ExperimentConfig, Format, Overrides, EXIT_VALIDATION};
use singular_schrodinger::Execution;

#[derive(Debug, Parser)]
#[command(name = "singular-schrodinger", version, about = "Matrix Schrödinger operators with H^-1 potentials")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the report, CSV tables and metadata.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance; the absolute tolerance is set to tol·1e-2.
    #[arg(long)]
    tol: Option<f64>,
    /// Truncation radius for `spectrum` and `semigroup`.
    #[arg(long)]
    radius: Option<f64>,
    /// Spectral window `a,b` (real) or `a,b,c,d` (complex rectangle).
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Use a corpus potential instead of the configured one.
    #[arg(long)]
    corpus: Option<String>,
    /// Run every loop sequentially.
    #[arg(long)]
    sequential: bool,
}

fn write(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::write(dir.join(name), contents)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let overrides = Overrides {
        seed: cli.seed,
        tol: cli.tol,
        radius: cli.radius,
        window: cli.window.clone(),
        format: cli.format,
        out: cli.out.clone(),
        corpus: cli.corpus.clone(),
    };
    let cfg = cli
        .config
        .as_deref()
        .map(load_config)
        .unwrap_or_else(|| Ok(ExperimentConfig::default()))
        .and_then(|mut cfg| overrides.apply(&mut cfg).map(|_| cfg));
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };

    let started = SystemTime::now();
    let clock = Instant::now();
    let out = run(cli.command, &cfg, exec);
    let elapsed = clock.elapsed();
    print!("{}", out.summary);

    if let Some(dir) = &cfg.output.dir {
        let written = std::fs::create_dir_all(dir).and_then(|_| {
            if cfg.output.format.json() {
                write(dir, &format!("{}.json", cli.command.name()), &out.report)?;
            }
            for (name, body) in &out.csv {
                write(dir, name, body)?;
            }
            write(dir, "metadata.json", &metadata(cli.command, started, elapsed, exec))
        });
        if let Err(e) = written {
            eprintln!("error: cannot write artifacts to {}: {e}", dir.display());
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    } else if cfg.output.format.json() && out.exit_code != 0 {
        eprintln!("{}", out.report);
    }
    ExitCode::from(out.exit_code as u8)
}
