//! Per-weight eigenform cache.
//!
//! One JSON document per weight, `weight_<k>.json`, holding the normalized
//! `a_f(p)` as 18-significant-digit decimal strings, the exact `T_2` data
//! for dimensions up to 3, and any central values and `L(1, sym^2 f)`
//! computed so far. Writes go through a temporary file and a rename; a
//! lock file marks the directory as owned by one process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::hecke::{dimension, eigenforms_for_weights, EigenSystem, HeckeEigenform};
use crate::lfun::CentralValueRecord;
use crate::moments::{supported_weights, Family};
use crate::specfun::BumpWeight;
use crate::{Error, Result};

pub const SCHEMA: &str = "symsq-eigen/1";
pub const LOCK_FILE: &str = ".lock";
const EXACT_DIMENSION_LIMIT: usize = 3;

/// 18 significant digits; enough to round-trip any `f64`.
pub fn format_decimal(x: f64) -> String {
    format!("{x:.17e}")
}

fn parse_decimal(path: &Path, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse { path: path.to_path_buf(), message: format!("bad decimal {s:?}") })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDocument {
    pub schema: String,
    pub weight: u32,
    pub dimension: usize,
    pub prime_bound: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactData>,
    pub forms: Vec<FormEntry>,
}

/// Unnormalized `T_2` on the Victor Miller basis and its characteristic
/// polynomial (constant term first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactData {
    pub t2: Vec<Vec<String>>,
    pub charpoly: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormEntry {
    pub index: usize,
    pub a_p: Vec<(u64, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1_symsq: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub central: Vec<CentralEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralEntry {
    pub tolerance: String,
    pub value: String,
    pub truncation: usize,
    pub truncation_error: String,
}

impl WeightDocument {
    pub fn from_system(system: &EigenSystem) -> Self {
        let dim = system.forms.len();
        let exact = (dim <= EXACT_DIMENSION_LIMIT).then(|| ExactData {
            t2: system.t2.entries.iter().map(|row| row.iter().map(|c| c.to_string()).collect()).collect(),
            charpoly: system.t2.charpoly().unwrap_or_default().iter().map(|c| c.to_string()).collect(),
        });
        WeightDocument {
            schema: SCHEMA.to_string(),
            weight: system.weight,
            dimension: dim,
            prime_bound: system.forms.first().map_or(0, |f| f.prime_bound),
            exact,
            forms: system.forms.iter().map(FormEntry::from_form).collect(),
        }
    }

    /// Rebuild the eigenforms; `path` is used for error context.
    pub fn forms(&self, path: &Path) -> Result<Vec<HeckeEigenform>> {
        self.forms
            .iter()
            .map(|e| {
                let table = e
                    .a_p
                    .iter()
                    .map(|(p, s)| Ok((*p, parse_decimal(path, s)?)))
                    .collect::<Result<Vec<_>>>()?;
                let mut f = HeckeEigenform::new(self.weight, e.index, self.prime_bound, table);
                f.l1_symsq = e.l1_symsq.as_deref().map(|s| parse_decimal(path, s)).transpose()?;
                Ok(f)
            })
            .collect()
    }

    /// Record `L(1, sym^2 f)` and central values, replacing any entry at the
    /// same tolerance.
    pub fn append_values(&mut self, forms: &[HeckeEigenform], central: &[CentralValueRecord], tolerance: f64) {
        let tol = format_decimal(tolerance);
        for (entry, f) in self.forms.iter_mut().zip(forms) {
            if let Some(l1) = f.l1_symsq {
                entry.l1_symsq = Some(format_decimal(l1));
            }
        }
        for rec in central {
            let Some(entry) = self.forms.iter_mut().find(|e| e.index == rec.index) else { continue };
            entry.central.retain(|c| c.tolerance != tol);
            entry.central.push(CentralEntry {
                tolerance: tol.clone(),
                value: format_decimal(rec.value),
                truncation: rec.truncation,
                truncation_error: format_decimal(rec.truncation_error),
            });
            entry.central.sort_by(|a, b| a.tolerance.cmp(&b.tolerance));
        }
    }

    fn validate(&self, path: &Path, weight: u32) -> Result<()> {
        let bad = |message: String| Err(Error::Parse { path: path.to_path_buf(), message });
        if self.weight != weight {
            return bad(format!("document is for weight {}, file name says {weight}", self.weight));
        }
        if self.dimension != dimension(weight) || self.forms.len() != self.dimension {
            return bad(format!(
                "weight {weight} needs {} forms, document has dimension {} and {} forms",
                dimension(weight),
                self.dimension,
                self.forms.len()
            ));
        }
        Ok(())
    }
}

impl FormEntry {
    fn from_form(f: &HeckeEigenform) -> Self {
        FormEntry {
            index: f.index,
            a_p: f.prime_eigenvalues.iter().map(|&(p, a)| (p, format_decimal(a))).collect(),
            l1_symsq: f.l1_symsq.map(format_decimal),
            central: Vec::new(),
        }
    }
}

/// Held while a process owns the cache directory.
#[derive(Debug)]
struct LockGuard {
    path: PathBuf,
}

impl LockGuard {
    fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                writeln!(file, "{}", std::process::id()).map_err(|e| Error::io(&path, e))?;
                Ok(LockGuard { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::io(
                &path,
                std::io::Error::new(e.kind(), "cache directory is locked by another run; remove the lock file if it is stale"),
            )),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("cache");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()
    };
    write().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Write `contents` through a temporary file and a rename.
pub fn write_file_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    write_atomic(path, contents)
}

pub fn weight_file_name(k: u32) -> String {
    format!("weight_{k:03}.json")
}

fn weight_from_file_name(name: &str) -> Option<u32> {
    name.strip_prefix("weight_")?.strip_suffix(".json")?.parse().ok()
}

/// An open, locked cache directory.
#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    _lock: LockGuard,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let lock = LockGuard::acquire(&dir)?;
        Ok(Cache { dir, _lock: lock })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, k: u32) -> PathBuf {
        self.dir.join(weight_file_name(k))
    }

    /// `None` if absent or written under another schema. Unreadable or
    /// malformed documents are errors carrying the path.
    pub fn load(&self, k: u32) -> Result<Option<WeightDocument>> {
        let path = self.path_for(k);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Parse { path: path.clone(), message: e.to_string() })?;
        if value.get("schema").and_then(|s| s.as_str()) != Some(SCHEMA) {
            return Ok(None);
        }
        let doc: WeightDocument =
            serde_json::from_value(value).map_err(|e| Error::Parse { path: path.clone(), message: e.to_string() })?;
        doc.validate(&path, k)?;
        Ok(Some(doc))
    }

    pub fn store(&self, doc: &WeightDocument) -> Result<PathBuf> {
        let path = self.path_for(doc.weight);
        let mut text = serde_json::to_string_pretty(doc).expect("cache document serializes");
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    /// Eigenforms for each weight with cusp forms, covering all primes up to
    /// `prime_bound`. Missing or too-short entries are computed and stored.
    pub fn eigenforms(&self, weights: &[u32], prime_bound: u64) -> Result<Vec<(u32, Vec<HeckeEigenform>)>> {
        let mut out = Vec::new();
        let mut missing = Vec::new();
        for &k in weights.iter().filter(|&&k| dimension(k) > 0) {
            match self.load(k)? {
                Some(doc) if doc.prime_bound >= prime_bound => out.push((k, doc.forms(&self.path_for(k))?)),
                _ => missing.push(k),
            }
        }
        if !missing.is_empty() {
            for system in eigenforms_for_weights(&missing, prime_bound)? {
                self.store(&WeightDocument::from_system(&system))?;
                out.push((system.weight, system.forms));
            }
        }
        out.sort_by_key(|(k, _)| *k);
        Ok(out)
    }

    /// The weighted family at scale `K`, with `L(1)` and central values
    /// written back to the cache.
    pub fn family(&self, k_scale: f64, h: &BumpWeight, prime_bound: u64, tolerance: f64) -> Result<Family> {
        let weights = supported_weights(k_scale, h);
        let systems = self.eigenforms(&weights, prime_bound)?;
        let family = Family::from_forms(k_scale, h, tolerance, systems)?;
        for block in family.blocks.iter().filter(|b| !b.forms.is_empty()) {
            let Some(mut doc) = self.load(block.weight)? else { continue };
            let before = doc.clone();
            doc.append_values(&block.forms, &block.central, tolerance);
            if doc != before {
                self.store(&doc)?;
            }
        }
        Ok(family)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeepPolicy {
    /// Remove only entries written under another schema.
    Current,
    /// Remove every entry.
    Nothing,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GcSummary {
    pub scanned: usize,
    pub removed: usize,
    pub kept: usize,
    /// Files that could not be parsed; left in place.
    pub unreadable: Vec<PathBuf>,
}

/// Remove stale cache entries and leftover temporary files.
pub fn cache_gc(dir: &Path, keep: KeepPolicy) -> Result<GcSummary> {
    let _lock = LockGuard::acquire(dir)?;
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    let mut summary = GcSummary::default();
    for path in entries {
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if name.starts_with(".weight_") && name.contains(".tmp") {
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            continue;
        }
        if weight_from_file_name(name).is_none() {
            continue;
        }
        summary.scanned += 1;
        let stale = match keep {
            KeepPolicy::Nothing => true,
            KeepPolicy::Current => {
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                match serde_json::from_str::<serde_json::Value>(&text) {
                    Ok(v) => v.get("schema").and_then(|s| s.as_str()) != Some(SCHEMA),
                    Err(_) => {
                        summary.unreadable.push(path.clone());
                        summary.kept += 1;
                        continue;
                    }
                }
            }
        };
        if stale {
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            summary.removed += 1;
        } else {
            summary.kept += 1;
        }
    }
    Ok(summary)
}
