//! Experiment harness: flat configs in, CSV/JSONL tables and a JSON summary out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

pub use config::{Experiment, ExperimentConfig, Params};
pub use error::{CliError, Result, EXIT_BOUND_FAILURE, EXIT_CONFIG, EXIT_PASS, EXIT_RUNTIME};
pub use experiments::{run_experiment, schema, schema_document, Outcome};
pub use table::{Cell, Column, Kind, Table};

pub const RESULTS_CSV: &str = "results.csv";
pub const RESULTS_JSONL: &str = "results.jsonl";
pub const SUMMARY_JSON: &str = "summary.json";
pub const CONSTANTS_JSON: &str = "constants.json";

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes every output file of `outcome` into `cfg.output_path`.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &Outcome, wall_seconds: f64) -> Result<()> {
    let dir = &cfg.output_path;
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    write(&dir.join(RESULTS_CSV), &outcome.table.to_csv()?)?;
    write(&dir.join(RESULTS_JSONL), &outcome.table.to_jsonl())?;
    let summary = json!({
        "experiment": cfg.experiment,
        "config": cfg,
        "passed": outcome.passed(),
        "reports": outcome.reports,
        "constants": outcome.constants,
        "notes": outcome.notes,
        "wall_time_seconds": wall_seconds,
    });
    write(&dir.join(SUMMARY_JSON), &serde_json::to_string_pretty(&summary).expect("summary serializes"))?;
    if let Some(c) = &outcome.constants {
        write(&dir.join(CONSTANTS_JSON), &serde_json::to_string_pretty(c).expect("constants serialize"))?;
    }
    Ok(())
}

/// Runs a validated config, writes its outputs and returns the exit code.
pub fn execute(cfg: &ExperimentConfig) -> Result<u8> {
    let start = Instant::now();
    let outcome = run_experiment(cfg)?;
    write_outputs(cfg, &outcome, start.elapsed().as_secs_f64())?;
    Ok(if outcome.passed() { EXIT_PASS } else { EXIT_BOUND_FAILURE })
}
