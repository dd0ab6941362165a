// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Config-driven command line runner.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3
//! numerical-quality failure.

pub mod config;
pub mod run;
pub mod table;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

pub use config::{Experiment, RunConfig};
pub use run::{run_experiment, Outcome};
pub use table::{format_g12, Cell, Table};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "simqdc", version, about = "Mechanical delayed-choice simulations")]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output path; overrides `out` in the config. Without either the
    /// table goes to stdout and the summary to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Run with parsed arguments; returns the process exit code.
pub fn execute(args: &Args) -> i32 {
    match try_execute(args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("simqdc: {e}");
            exit_code(&e)
        }
    }
}

fn try_execute(args: &Args) -> crate::error::Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let out_path = args.out.clone().or_else(|| cfg.out.clone());
    let start = Instant::now();
    let outcome = run_experiment(args.experiment, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut summary = String::new();
    for (k, v) in &outcome.summary {
        summary.push_str(&format!("{k}: {v}\n"));
    }
    summary.push_str(&format!("rows: {}\nruntime [s]: {elapsed:.2}\n", outcome.table.rows.len()));
    match out_path {
        Some(p) => {
            outcome.table.write_to(&p)?;
            summary.push_str(&format!("output: {}\n", p.display()));
            print!("{summary}");
        }
        None => {
            let bytes = outcome.table.to_bytes()?;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })?;
            eprint!("{summary}");
        }
    }
    Ok(())
}

pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    execute(&args)
}
