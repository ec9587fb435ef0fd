use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orbitsieve_cli::{dispatch, parse_config, CliError, Command};
use orbitsieve_core::Execution;
use serde_json::json;

/// Orbit enumeration, local densities and weighted-sieve bounds.
#[derive(Debug, Parser)]
#[command(name = "orbitsieve", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the data-parallel paths (1 runs sequentially).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: &Args) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::Io {
        path: args.config.clone(),
        source,
    })?;
    let cfg = parse_config(&text)?;
    eprintln!("{}", json!({ "config": cfg.echo() }));
    let execution = match args.threads {
        Some(0) => {
            return Err(CliError::Validation {
                field: "--threads".into(),
                message: "must be ≥ 1".into(),
            })
        }
        Some(1) => Execution::Sequential,
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .map_err(|e| CliError::Validation {
                    field: "--threads".into(),
                    message: e.to_string(),
                })?;
            Execution::Parallel
        }
        None => Execution::default(),
    };
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let summary = dispatch(&cfg, args.command, &out, execution)?;
    println!("{}", json!({ "command": args.command.name(), "ok": true, "summary": summary }));
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::Validation {
                field: "<arguments>".into(),
                message: e.kind().to_string(),
            };
            eprint!("{e}");
            eprintln!("{}", err.to_json_line());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code())
        }
    }
}
