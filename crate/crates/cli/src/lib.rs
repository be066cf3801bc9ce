//! The `plauscheck` command line: store validation, forgery injection,
//! dataset preparation, check execution and backend evaluation.

pub mod config;
mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::dispatch;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURES: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BACKEND_OR_IO: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Backend(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Validation(_) => exit::FAILURES,
            CliError::Backend(_) | CliError::Io(_) => exit::BACKEND_OR_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "plauscheck", version, about = "Plausibility checks for identity documents")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// TOML file with default settings
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Store bundle (JSON)
    #[arg(long, global = true)]
    pub store: Option<PathBuf>,
    /// Task suite (JSON lines)
    #[arg(long, global = true)]
    pub suite: Option<PathBuf>,
    /// Completion backend: mock or http
    #[arg(long, global = true)]
    pub backend: Option<String>,
    #[arg(long, global = true)]
    pub base_url: Option<String>,
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Mock fixture table (prompt hash to completions)
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    /// Samples per task
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Scoring mode: exact, regex or both
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Token counter: approx-words, bytes-div-4, external or external:CMD
    #[arg(long, global = true)]
    pub counter: Option<String>,
    /// Maximum chunk size in tokens
    #[arg(long, global = true)]
    pub max_tokens: Option<String>,
    /// Maximum completion length requested from the backend
    #[arg(long, global = true)]
    pub completion_tokens: Option<String>,
    #[arg(long, global = true)]
    pub temperature: Option<String>,
    /// Concurrent backend requests
    #[arg(long, global = true)]
    pub parallel: Option<String>,
    /// Output file; standard output when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format: csv, markdown or json-lines
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Collapse whitespace before computing code match
    #[arg(long, global = true)]
    pub normalize_ws: bool,
}

impl GlobalArgs {
    /// The flags that were given, as a configuration layer.
    pub fn layer(&self) -> config::Layer {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let pairs = [
            ("store", path(&self.store)),
            ("suite", path(&self.suite)),
            ("backend", self.backend.clone()),
            ("base_url", self.base_url.clone()),
            ("model", self.model.clone()),
            ("fixtures", path(&self.fixtures)),
            ("k", self.k.clone()),
            ("mode", self.mode.clone()),
            ("counter", self.counter.clone()),
            ("max_tokens", self.max_tokens.clone()),
            ("completion_tokens", self.completion_tokens.clone()),
            ("temperature", self.temperature.clone()),
            ("parallel", self.parallel.clone()),
            ("out", path(&self.out)),
            ("format", self.format.clone()),
            ("seed", self.seed.clone()),
            ("normalize_ws", self.normalize_ws.then(|| "true".to_string())),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a store bundle and print collection sizes
    Ingest {
        /// Also write document-property records (JSON lines) here
        #[arg(long)]
        properties: Option<PathBuf>,
    },
    /// Apply forgery injections from a JSON file and write the altered store
    Forge { changes: PathBuf },
    /// Split source files into token-bounded chunks; writes the manifest
    Chunk {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Chunk source files and ask the backend for one instruction per chunk
    Instruct {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Generate new checks modelled on seed checks
    Augment {
        #[arg(required = true)]
        seeds: Vec<PathBuf>,
        /// Number of checks to generate
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Pair a check with documents and their expected outputs
    Examples {
        check: PathBuf,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Run one check against one document and print the outcome
    CheckRun {
        check: PathBuf,
        #[arg(long)]
        document: u64,
        /// Log failed guards instead of stopping
        #[arg(long)]
        relaxed: bool,
    },
    /// Sample and score completions; writes per-task results (JSON lines)
    Generate,
    /// Sample, score and aggregate into a report
    Evaluate,
    /// Aggregate per-task results written by `generate` into a report
    Report { results: PathBuf },
    /// Send a one-token request to the backend
    Health,
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli, |name| std::env::var(name).ok()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
