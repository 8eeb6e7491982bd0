use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chenstein_cli::{execute, schema_document, CliError, ExperimentConfig, EXIT_PASS};
use clap::Parser;

/// Runs one bound-check experiment described by a flat key = value config.
#[derive(Parser, Debug)]
#[command(name = "chenstein", version)]
struct Args {
    /// Experiment config file.
    #[arg(long, value_name = "PATH", required_unless_present = "schema")]
    config: Option<PathBuf>,
    /// Overrides the master seed of the config.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Overrides the worker thread count.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Overrides the output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Prints the report schema document and exits.
    #[arg(long)]
    schema: bool,
}

fn run(args: Args) -> Result<u8, CliError> {
    if args.schema {
        println!("{}", serde_json::to_string_pretty(&schema_document()).expect("schema serializes"));
        return Ok(EXIT_PASS);
    }
    let path = args.config.expect("clap enforces --config");
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = args.out {
        cfg.output_path = o;
    }
    cfg.validate()?;
    let code = execute(&cfg)?;
    if code != EXIT_PASS {
        eprintln!("bound check failed; see {}", cfg.output_path.join(chenstein_cli::SUMMARY_JSON).display());
    }
    Ok(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
