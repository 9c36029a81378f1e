use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nematic_lab::harness::{self, HarnessError};

/// Thread count for sweeps and quadrature.
const THREADS_VAR: &str = "NEMATIC_THREADS";

#[derive(Parser)]
#[command(name = "nematic-lab", version, about = "Axisymmetric, Poiseuille and Hopf-map experiments for nematic flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Run every config matching a glob pattern, concurrently.
    Sweep {
        pattern: String,
        #[arg(long)]
        no_plots: bool,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
}

fn fail(e: &HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {THREADS_VAR}: {e}");
        }
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match harness::load(&config) {
            Ok(cfg) => {
                println!("{}: ok ({})", config.display(), cfg.experiment.name());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Simulate { config, out, no_plots } => {
            let cfg = match harness::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = harness::output_dir(&cfg, &config, out.as_deref());
            match harness::run(&cfg, &dir, !no_plots) {
                Ok(outcome) => {
                    for f in &outcome.files {
                        println!("{}", f.display());
                    }
                    match outcome.halted {
                        Some(h) => {
                            eprintln!("run halted early: {h}");
                            ExitCode::from(3)
                        }
                        None => ExitCode::SUCCESS,
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Sweep { pattern, no_plots } => {
            let paths: Vec<PathBuf> = match glob::glob(&pattern) {
                Ok(g) => g.filter_map(Result::ok).collect(),
                Err(e) => {
                    eprintln!("error: bad pattern: {e}");
                    return ExitCode::from(2);
                }
            };
            if paths.is_empty() {
                eprintln!("error: no configs match {pattern}");
                return ExitCode::from(2);
            }
            let mut worst = 0u8;
            for (path, result) in harness::sweep(&paths, !no_plots) {
                match result {
                    Ok(o) if o.halted.is_none() => println!("{}: ok -> {}", path.display(), o.dir.display()),
                    Ok(o) => {
                        println!("{}: halted ({}) -> {}", path.display(), o.halted.unwrap_or_default(), o.dir.display());
                        worst = worst.max(3);
                    }
                    Err(e) => {
                        println!("{}: error: {e}", path.display());
                        worst = worst.max(e.exit_code() as u8);
                    }
                }
            }
            ExitCode::from(worst)
        }
    }
}
