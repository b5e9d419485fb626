//! Library side of the `symsq` binary: flag parsing, configuration and the
//! experiment commands.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

pub use config::{Command, Overrides, RunConfig, ENV_CACHE_DIR};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io { path: Option<PathBuf>, message: String },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => f.write_str(m),
            CliError::Io { path: Some(p), message } => write!(f, "{}: {message}", p.display()),
            CliError::Io { path: None, message } => f.write_str(message),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    /// One-line JSON failure summary.
    pub fn summary(&self, command: Option<Command>) -> Value {
        let mut v = json!({
            "status": "error",
            "command": command.map(Command::name),
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Io { path: Some(p), .. } = self {
            v["path"] = json!(p.display().to_string());
        }
        v
    }
}

impl From<symsq_core::Error> for CliError {
    fn from(e: symsq_core::Error) -> Self {
        use symsq_core::Error as E;
        match e {
            E::Io { path, source } => CliError::Io { path: Some(path), message: source.to_string() },
            E::Parse { path, message } => CliError::Io { path: Some(path), message: format!("corrupted: {message}") },
            E::InvalidArgument(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "symsq", version, about = "Desk-scale experiments on mollified moments of symmetric-square L-functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CommandArg {
    /// Hecke eigenforms of weight k (cached)
    Eigenforms,
    /// L(1/2, sym^2 f) and L(1, sym^2 f) for every form of weight k
    Lvalues,
    /// The exact-identity suite
    Identities,
    /// Petersson trace formula at (k, n, m)
    TraceCheck,
    /// Bessel-average lemma against its main term
    BesselCheck,
    /// Optimal mollifier coefficients and asymptotic predictions
    Mollifier,
    /// Empirical first and second moments against their main terms
    Moments,
    /// Mollified moments and the Cauchy-Schwarz ratio
    Ratio,
    /// Remove stale cache entries
    CacheGc,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Eigenforms => Command::Eigenforms,
            CommandArg::Lvalues => Command::Lvalues,
            CommandArg::Identities => Command::Identities,
            CommandArg::TraceCheck => Command::TraceCheck,
            CommandArg::BesselCheck => Command::BesselCheck,
            CommandArg::Mollifier => Command::Mollifier,
            CommandArg::Moments => Command::Moments,
            CommandArg::Ratio => Command::Ratio,
            CommandArg::CacheGc => Command::CacheGc,
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Family scale K; a comma-separated list runs each value
    #[arg(long = "K", global = true, value_name = "K[,K...]")]
    pub k_scale: Option<String>,
    /// Mollifier exponent, 0 < a < 1/2
    #[arg(long, global = true)]
    pub a: Option<String>,
    /// Twist r; comma-separated list allowed
    #[arg(long, global = true, value_name = "R[,R...]")]
    pub r: Option<String>,
    /// Weight k
    #[arg(long, global = true)]
    pub k: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<String>,
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Largest Kloosterman modulus in the trace formula
    #[arg(long = "c-max", global = true)]
    pub c_max: Option<String>,
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<String>,
    #[arg(long = "out-dir", global = true)]
    pub out_dir: Option<String>,
    #[arg(long, global = true)]
    pub workers: Option<String>,
    /// Truncation tolerance for central values
    #[arg(long, global = true)]
    pub tolerance: Option<String>,
    #[arg(long = "h-family", global = true)]
    pub h_family: Option<String>,
    /// Bump support as lo,hi
    #[arg(long = "h-params", global = true, value_name = "LO,HI", allow_hyphen_values = true)]
    pub h_params: Option<String>,
    /// Config document (key = value lines under [section] headers)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        let mut o = Overrides { entries: Vec::new(), config: self.config.clone() };
        o.set("run.K", self.k_scale.clone());
        o.set("run.a", self.a.clone());
        o.set("run.r", self.r.clone());
        o.set("run.k", self.k.clone());
        o.set("run.n", self.n.clone());
        o.set("run.m", self.m.clone());
        o.set("run.c_max", self.c_max.clone());
        o.set("paths.cache_dir", self.cache_dir.clone());
        o.set("paths.out_dir", self.out_dir.clone());
        o.set("run.workers", self.workers.clone());
        o.set("run.tolerance", self.tolerance.clone());
        o.set("h.family", self.h_family.clone());
        o.set("h.params", self.h_params.clone());
        o
    }
}

/// Result of a command that ran to completion.
#[derive(Debug)]
pub struct Outcome {
    pub reports: Vec<PathBuf>,
    pub summary: Value,
    /// Set when a checked numerical contract did not hold; reports are still
    /// written.
    pub violation: Option<String>,
}

/// Resolve the configuration and run. Returns the process exit code and the
/// JSON summary to print.
pub fn main_with(cli: Cli, env_cache_dir: Option<String>) -> (i32, Value) {
    let command: Command = cli.command.into();
    let config = match RunConfig::resolve(command, &cli.flags.overrides(), env_cache_dir) {
        Ok(c) => c,
        Err(e) => return (e.exit_code(), e.summary(Some(command))),
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build_global() {
        // a pool already exists (library use); keep it
        let _ = e;
    }
    let start = std::time::Instant::now();
    match commands::run(&config) {
        Ok(out) => {
            let status = if out.violation.is_some() { "failed" } else { "ok" };
            let mut v = json!({
                "status": status,
                "command": command.name(),
                "reports": out.reports.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "summary": out.summary,
                "runtime_seconds": start.elapsed().as_secs_f64(),
            });
            match out.violation {
                Some(msg) => {
                    v["kind"] = json!("numerical");
                    v["exit_code"] = json!(EXIT_NUMERICAL);
                    v["message"] = json!(msg);
                    (EXIT_NUMERICAL, v)
                }
                None => (0, v),
            }
        }
        Err(e) => (e.exit_code(), e.summary(Some(command))),
    }
}
