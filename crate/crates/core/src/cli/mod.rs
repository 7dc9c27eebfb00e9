//! The `chung` command-line front end.
//!
//! Exit codes: 0 success, 2 parameter or domain error, 3 capability error,
//! 4 insufficient data, 1 anything else (I/O, cancellation).

mod args;
mod commands;
mod output;

use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde_json::Value;

use crate::error::{parameter, Error};

pub use args::{parse_count, parse_seed, Cli, Command, Format, RunConfig, DEFAULT_SEED};
pub use output::{to_json, write_csv, Record};

/// Environment variable consulted for the thread count when `--threads` is absent.
pub const THREADS_ENV: &str = "CHUNG_THREADS";

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Domain(_) | Error::Parameter(_) | Error::Divergence(_) | Error::Mode(_)) => 2,
            CliError::Lib(Error::Capability(_)) => 3,
            CliError::Lib(Error::InsufficientData { .. }) => 4,
            CliError::Lib(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| parameter(format!("{}: {e}", path.display())))?;
    // accept an emitted record as well as a bare run config
    if let Some(inner) = v.get_mut("config") {
        v = inner.take();
    }
    Ok(serde_json::from_value(v).map_err(|e| parameter(format!("{}: {e}", path.display())))?)
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn env_threads() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| parameter(format!("{THREADS_ENV} must be a positive integer, got {s:?}")).into()),
        Err(_) => Ok(None),
    }
}

/// Merge the config file, flags and environment into one resolved config.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = cli.config.as_deref().map(load_config).transpose()?;
    let mut command = match (&file, &cli.command) {
        (Some(f), Some(flags)) => {
            let mut c = f.command.clone();
            c.overlay(flags)?;
            c
        }
        (Some(f), None) => f.command.clone(),
        (None, Some(flags)) => flags.clone(),
        (None, None) => return Err(parameter("no subcommand given (see --help)").into()),
    };
    command.resolve()?;
    // threads never change results; the environment only fills a missing flag
    let threads = match cli.threads {
        Some(t) => t,
        None => env_threads()?.or(file.as_ref().and_then(|f| f.threads)).unwrap_or_else(default_threads),
    };
    if threads == 0 {
        return Err(parameter("--threads must be at least 1").into());
    }
    Ok(RunConfig {
        command,
        format: cli.format.or(file.as_ref().map(|f| f.format)).unwrap_or_default(),
        threads: Some(threads),
        seed: cli.seed.or(file.as_ref().map(|f| f.seed)).unwrap_or(DEFAULT_SEED),
    })
}

/// Produce the records for a resolved config.
pub fn execute(cfg: &RunConfig) -> Result<Vec<Record>, CliError> {
    let threads = cfg.threads.unwrap_or(1);
    let seed = cfg.seed;
    log::info!("running {}", cfg.command.name());
    Ok(match &cfg.command {
        Command::Smallball(a) => commands::smallball(a)?,
        Command::Constants(a) => commands::constants(a)?,
        Command::Series(a) => commands::series(a)?,
        Command::Mc(a) => commands::mc(a, seed, threads)?,
        Command::Sweep(a) => commands::sweep(a, seed, threads)?,
        Command::Truncate(a) => commands::truncate(a, seed, threads)?,
        Command::IntegralTest(a) => commands::integral_test(a)?,
        Command::Condition(a) => commands::condition(a)?,
    })
}

pub fn render<W: Write>(out: &mut W, cfg: &RunConfig, records: &[Record]) -> Result<(), CliError> {
    match cfg.format {
        Format::Csv => write_csv(out, records, cfg.seed)?,
        Format::Json => {
            let config = serde_json::to_value(cfg).expect("config serializes");
            let doc = to_json(records, cfg.seed, config);
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Full run from parsed arguments; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = resolve(&cli).and_then(|cfg| {
        let records = execute(&cfg)?;
        match &cli.output {
            Some(path) => {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                render(&mut f, &cfg, &records)?;
                f.flush()?;
            }
            None => render(&mut std::io::stdout().lock(), &cfg, &records)?,
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parse `std::env::args` and run.
pub fn main_from_env() -> i32 {
    run(Cli::parse())
}
