//! The `urs` command line: one run per invocation, a text report ending in a
//! `report {json}` line, and (with `--out`) the produced files plus a
//! `manifest.txt` that records everything needed to repeat the run.
//!
//! Exit codes: 0 success, 1 certificate failure, 2 usage or malformed
//! input, 3 budget exhausted.

mod commands;
mod source;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rng::derive_seed;

pub use commands::{ColorCmd, ConstructCmd, KernelCmd, SoficCmd, UrsCmd};
pub use source::{ViewArgs, WindowsFile};

#[derive(Parser, Debug)]
#[command(
    name = "urs",
    version,
    about = "Finite-scale computations on labeled Schreier graphs"
)]
pub struct Cli {
    /// Master seed; every random choice draws from a named substream of it
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Wall-clock budget for budgeted searches
    #[arg(long, global = true)]
    pub budget_ms: Option<u64>,
    /// Directory for produced files and the run manifest
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build graphs: cycles, tori, trees, involution graphs, cover towers
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Nonrepetitive and distance-proper colorings
    #[command(subcommand)]
    Color(ColorCmd),
    /// Ball-type classes, repetition and genericity certificates
    #[command(subcommand)]
    Urs(UrsCmd),
    /// Følner sets, completions, local statistics, decompositions
    #[command(subcommand)]
    Sofic(SoficCmd),
    /// Local kernels: evaluation, products, norms, traces, projections
    #[command(subcommand)]
    Kernel(KernelCmd),
}

impl Command {
    fn path(&self) -> String {
        let (head, tail) = match self {
            Command::Construct(c) => ("construct", c.name()),
            Command::Color(c) => ("color", c.name()),
            Command::Urs(c) => ("urs", c.name()),
            Command::Sofic(c) => ("sofic", c.name()),
            Command::Kernel(c) => ("kernel", c.name()),
        };
        format!("{head} {tail}")
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 3,
            _ => 2,
        }
    }
}

macro_rules! lib_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Failed(e.to_string())
            }
        }
    )*};
}

lib_error!(
    crate::graph::GraphError,
    crate::coloring::ColoringError,
    crate::urs::UrsError,
    crate::sofic::SoficError,
    crate::kernel::KernelError,
    crate::constructions::ConstructionError
);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    CertificateFailure,
    Budget,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::CertificateFailure => 1,
            Status::Budget => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::CertificateFailure => "certificate-failure",
            Status::Budget => "budget",
        }
    }
}

/// State of one invocation: seeds handed out, files read and produced, and
/// the report being assembled.
pub struct Run {
    pub seed: u64,
    pub budget: Option<Duration>,
    started: Instant,
    streams: BTreeMap<String, u64>,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
    lines: Vec<String>,
    fields: Map<String, Value>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    pub fn new(seed: u64, budget_ms: Option<u64>) -> Self {
        Self {
            seed,
            budget: budget_ms.map(Duration::from_millis),
            started: Instant::now(),
            streams: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            lines: Vec::new(),
            fields: Map::new(),
        }
    }

    pub fn seed_for(&mut self, name: &str) -> u64 {
        let s = derive_seed(self.seed, name);
        self.streams.insert(name.to_string(), s);
        s
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.budget.map(|b| self.started + b)
    }

    pub fn record_input(&mut self, path: &Path, text: &str) {
        self.inputs
            .push((path.display().to_string(), sha256_hex(text.as_bytes())));
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn field(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.fields.insert(key.to_string(), v);
    }

    /// A produced file, written under `--out` when given.
    pub fn artifact(&mut self, name: &str, contents: String) {
        self.outputs.push((name.to_string(), contents));
    }

    fn manifest(&self, command: &Command, budget_ms: Option<u64>, status: Status) -> String {
        let mut out = format!("manifest version={}\n", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "subcommand {}", command.path());
        let _ = writeln!(out, "params {command:?}");
        let _ = writeln!(out, "seed {}", self.seed);
        for (name, s) in &self.streams {
            let _ = writeln!(out, "stream {name} {s}");
        }
        let _ = writeln!(
            out,
            "budget_ms {}",
            budget_ms.map_or("-".into(), |b| b.to_string())
        );
        for (p, d) in &self.inputs {
            let _ = writeln!(out, "input {p} sha256={d}");
        }
        for (name, text) in &self.outputs {
            let _ = writeln!(
                out,
                "output {name} sha256={} bytes={}",
                sha256_hex(text.as_bytes()),
                text.len()
            );
        }
        let _ = writeln!(out, "wall_ms {}", self.started.elapsed().as_millis());
        let _ = writeln!(out, "status {}", status.name());
        out
    }
}

/// Parse `argv` (program name first), run, print the report to `stdout`
/// and return the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let mut run = Run::new(cli.seed, cli.budget_ms);
    let result = commands::dispatch(&mut run, &cli.command);
    let (status, code) = match result {
        Ok(s) => (s, s.code()),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let status = if matches!(e, CliError::Budget(_)) {
                Status::Budget
            } else {
                let _ = writeln!(
                    stdout,
                    "report {}",
                    serde_json::json!({"subcommand": cli.command.path(), "status": "error", "exit": e.code(), "error": e.to_string()})
                );
                return e.code();
            };
            (status, e.code())
        }
    };
    let manifest = run.manifest(&cli.command, cli.budget_ms, status);
    if let Some(dir) = &cli.out {
        let written = std::fs::create_dir_all(dir).and_then(|_| {
            for (name, text) in &run.outputs {
                std::fs::write(dir.join(name), text)?;
            }
            std::fs::write(dir.join("manifest.txt"), &manifest)
        });
        if let Err(e) = written {
            let _ = writeln!(stderr, "error: cannot write to {}: {e}", dir.display());
            return 2;
        }
    }
    for l in &run.lines {
        let _ = writeln!(stdout, "{l}");
    }
    let mut report = run.fields.clone();
    report.insert("subcommand".into(), cli.command.path().into());
    report.insert("status".into(), status.name().into());
    report.insert("exit".into(), code.into());
    report.insert(
        "outputs".into(),
        run.outputs
            .iter()
            .map(|o| Value::from(o.0.clone()))
            .collect(),
    );
    let _ = writeln!(stdout, "report {}", Value::Object(report));
    code
}
