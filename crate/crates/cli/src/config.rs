//! Run configuration: defaults, a flat `key = value` document with
//! `[section]` headers, and command-line flags, in increasing precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use symsq_core::cache::KeepPolicy;
use symsq_core::identities::SuiteSize;
use symsq_core::specfun::{make_bump, BumpFamily, BumpWeight};

use crate::CliError;

/// Overrides the cache directory from the config document (flags still win).
pub const ENV_CACHE_DIR: &str = "SYMSQ_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigenforms,
    Lvalues,
    Identities,
    TraceCheck,
    BesselCheck,
    Mollifier,
    Moments,
    Ratio,
    CacheGc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigenforms => "eigenforms",
            Command::Lvalues => "lvalues",
            Command::Identities => "identities",
            Command::TraceCheck => "trace-check",
            Command::BesselCheck => "bessel-check",
            Command::Mollifier => "mollifier",
            Command::Moments => "moments",
            Command::Ratio => "ratio",
            Command::CacheGc => "cache-gc",
        }
    }
}

/// Every accepted key with its default.
const DEFAULTS: &[(&str, &str)] = &[
    ("bessel.t", "100,1000,10000"),
    ("cache.keep", "current"),
    ("h.family", "standard"),
    ("h.params", ""),
    ("identities.size", "full"),
    ("paths.cache_dir", ".symsq-cache"),
    ("paths.out_dir", "reports"),
    ("report.timing", "false"),
    ("run.K", "40"),
    ("run.a", "0.3"),
    ("run.c_max", "1000"),
    ("run.k", "12"),
    ("run.m", "1"),
    ("run.n", "1"),
    ("run.prime_bound", "auto"),
    ("run.r", "1"),
    ("run.tolerance", "1e-10"),
    ("run.workers", "1"),
    ("thresholds.first_moment", "0.25"),
    ("thresholds.trace_defect", "1e-6"),
];

/// Keys that do not change any reported number and stay out of reports.
const NOT_EMBEDDED: &[&str] = &["paths.cache_dir", "paths.out_dir", "run.workers"];

/// Parse a config document into `section.key -> value`.
pub fn parse_document(text: &str, origin: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let at = || format!("{}:{}", origin.display(), i + 1);
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config(format!("{}: unterminated section header", at())))?;
            section = Some(name.trim().to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("{}: expected key = value", at())))?;
        let sec = section
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("{}: key '{}' outside any [section]", at(), key.trim())))?;
        let full = format!("{sec}.{}", key.trim());
        if !DEFAULTS.iter().any(|(k, _)| *k == full) {
            return Err(CliError::Config(format!("{}: unknown key '{full}'", at())));
        }
        if out.insert(full.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("{}: duplicate key '{full}'", at())));
        }
    }
    Ok(out)
}

/// Flag values as `section.key` overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub entries: Vec<(&'static str, String)>,
    pub config: Option<PathBuf>,
}

impl Overrides {
    pub fn set(&mut self, key: &'static str, value: Option<String>) {
        if let Some(v) = value {
            self.entries.push((key, v));
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub k_scales: Vec<f64>,
    pub a: f64,
    pub twists: Vec<u64>,
    pub weight: u32,
    pub n: u64,
    pub m: u64,
    pub c_max: u64,
    pub tolerance: f64,
    pub workers: usize,
    pub prime_bound: Option<u64>,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    pub h: BumpWeight,
    pub timing: bool,
    pub identity_size: SuiteSize,
    pub bessel_t: Vec<f64>,
    pub keep: KeepPolicy,
    pub first_moment_threshold: f64,
    pub trace_threshold: f64,
    /// Merged values, for embedding in reports.
    pub resolved: BTreeMap<String, String>,
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse(key, x)).collect()
}

impl RunConfig {
    /// Merge defaults, the config document, the cache-dir environment
    /// variable and the flags, then validate.
    pub fn resolve(command: Command, flags: &Overrides, env_cache_dir: Option<String>) -> Result<Self, CliError> {
        let mut merged: BTreeMap<String, String> =
            DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: cannot read config: {e}", path.display())))?;
            merged.extend(parse_document(&text, path)?);
        }
        if let Some(dir) = env_cache_dir.filter(|d| !d.is_empty()) {
            merged.insert("paths.cache_dir".into(), dir);
        }
        for (k, v) in &flags.entries {
            merged.insert(k.to_string(), v.clone());
        }
        Self::from_map(command, merged)
    }

    fn from_map(command: Command, map: BTreeMap<String, String>) -> Result<Self, CliError> {
        let get = |k: &str| map.get(k).map(String::as_str).expect("every key has a default");
        let k_scales: Vec<f64> = parse_list("K", get("run.K"))?;
        if k_scales.is_empty() || k_scales.iter().any(|&k| !(k >= 1.0 && k.is_finite())) {
            return Err(CliError::Config(format!("K must be a list of numbers >= 1, got '{}'", get("run.K"))));
        }
        let a: f64 = parse("a", get("run.a"))?;
        if !(a > 0.0 && a < 0.5) {
            return Err(CliError::Config(format!("a must lie in (0, 1/2), got {a}")));
        }
        let twists: Vec<u64> = parse_list("r", get("run.r"))?;
        if twists.is_empty() || twists.contains(&0) {
            return Err(CliError::Config(format!("r must be a list of positive integers, got '{}'", get("run.r"))));
        }
        let weight: u32 = parse("k", get("run.k"))?;
        if weight < 2 || weight % 2 == 1 {
            return Err(CliError::Config(format!("k must be an even weight, got {weight}")));
        }
        let n: u64 = parse("n", get("run.n"))?;
        let m: u64 = parse("m", get("run.m"))?;
        let c_max: u64 = parse("c-max", get("run.c_max"))?;
        if n == 0 || m == 0 || c_max == 0 {
            return Err(CliError::Config("n, m and c-max must be at least 1".into()));
        }
        let tolerance: f64 = parse("tolerance", get("run.tolerance"))?;
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(CliError::Config(format!("tolerance must lie in (0, 1), got {tolerance}")));
        }
        let workers: usize = parse("workers", get("run.workers"))?;
        if workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        let prime_bound = match get("run.prime_bound") {
            "auto" => None,
            v => {
                let p: u64 = parse("prime_bound", v)?;
                if p < 2 {
                    return Err(CliError::Config(format!("prime_bound must be 'auto' or at least 2, got {p}")));
                }
                Some(p)
            }
        };
        let family: BumpFamily = get("h.family").parse().map_err(|e| CliError::Config(format!("h-family: {e}")))?;
        let params: Vec<f64> = parse_list("h-params", get("h.params"))?;
        let h = make_bump(family, &params).map_err(|e| CliError::Config(format!("h-params: {e}")))?;
        let timing: bool = parse("report.timing", get("report.timing"))?;
        let identity_size = match get("identities.size") {
            "full" => SuiteSize::Full,
            "quick" => SuiteSize::Quick,
            v => return Err(CliError::Config(format!("identities.size must be 'full' or 'quick', got '{v}'"))),
        };
        let bessel_t: Vec<f64> = parse_list("bessel.t", get("bessel.t"))?;
        if bessel_t.is_empty() || bessel_t.iter().any(|&t| !(t > 0.0)) {
            return Err(CliError::Config("bessel.t must be a list of positive numbers".into()));
        }
        let keep = match get("cache.keep") {
            "current" => KeepPolicy::Current,
            "nothing" => KeepPolicy::Nothing,
            v => return Err(CliError::Config(format!("cache.keep must be 'current' or 'nothing', got '{v}'"))),
        };
        let first_moment_threshold: f64 = parse("thresholds.first_moment", get("thresholds.first_moment"))?;
        let trace_threshold: f64 = parse("thresholds.trace_defect", get("thresholds.trace_defect"))?;
        Ok(RunConfig {
            command,
            k_scales,
            a,
            twists,
            weight,
            n,
            m,
            c_max,
            tolerance,
            workers,
            prime_bound,
            cache_dir: PathBuf::from(get("paths.cache_dir")),
            out_dir: PathBuf::from(get("paths.out_dir")),
            h,
            timing,
            identity_size,
            bessel_t,
            keep,
            first_moment_threshold,
            trace_threshold,
            resolved: map,
        })
    }

    /// The resolved settings that can affect results, for reports.
    pub fn embedded(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> =
            self.resolved.iter().filter(|(k, _)| !NOT_EMBEDDED.contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();
        out.insert("command".into(), self.command.name().into());
        out
    }
}
