//! Config-driven experiment runner behind the command line tool.
//!
//! One TOML file describes one experiment; [`run::run`] executes it and writes
//! CSV series (with a `.meta.json` sidecar), a JSON report, and SVG plots into
//! the output directory.

pub mod config;
pub mod run;
pub mod series;
pub mod svg;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{Experiment, ExperimentConfig};
pub use run::{run, Outcome};
pub use series::TimeSeries;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid parameters: {0}")]
    Validation(crate::Error),
    #[error("run failed: {0}")]
    Runtime(crate::Error),
    #[error("series: {0}")]
    Series(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    /// 2 for bad input, 3 for failed runs, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Validation(_) => 2,
            HarnessError::Runtime(_) | HarnessError::Series(_) => 3,
            HarnessError::Io { .. } => 4,
        }
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    ExperimentConfig::parse(&text)
}

/// Output directory: `--out` wins, then the config's `output_dir`, then
/// `out/<config stem>`.
pub fn output_dir(config: &ExperimentConfig, config_path: &Path, cli: Option<&Path>) -> PathBuf {
    if let Some(dir) = cli {
        return dir.to_path_buf();
    }
    if let Some(dir) = &config.output_dir {
        return dir.clone();
    }
    let stem = config_path.file_stem().map(|s| s.to_string_lossy().into_owned());
    Path::new("out").join(stem.unwrap_or_else(|| config.experiment.name().to_string()))
}

/// Runs every config concurrently, each in its own output directory.
pub fn sweep(paths: &[PathBuf], plots: bool) -> Vec<(PathBuf, Result<Outcome, HarnessError>)> {
    paths
        .par_iter()
        .map(|p| {
            let result = load(p).and_then(|cfg| run(&cfg, &output_dir(&cfg, p, None), plots));
            (p.clone(), result)
        })
        .collect()
}
