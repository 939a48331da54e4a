//! Named verification suites, parameter sweeps and report emission.

mod bodies;
mod suites;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{format_float, write_atomic};
use crate::report::CheckReport;

pub use bodies::parse_body;
pub use suites::{brute_force_admissibility, jobs_for};
pub use sweep::{sweep, sweep_csv, SweepRow};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SANTALO_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Gaussian,
    Admissibility,
    ReverseHc,
    ForwardHc,
    Harnack,
    Fenchel,
    Santalo,
    Mahler,
    Weighted,
    Flows,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 10] = [
        Suite::Gaussian,
        Suite::Admissibility,
        Suite::ReverseHc,
        Suite::ForwardHc,
        Suite::Harnack,
        Suite::Fenchel,
        Suite::Santalo,
        Suite::Mahler,
        Suite::Weighted,
        Suite::Flows,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gaussian => "gaussian",
            Suite::Admissibility => "admissibility",
            Suite::ReverseHc => "reverse_hc",
            Suite::ForwardHc => "forward_hc",
            Suite::Harnack => "harnack",
            Suite::Fenchel => "fenchel",
            Suite::Santalo => "santalo",
            Suite::Mahler => "mahler",
            Suite::Weighted => "weighted",
            Suite::Flows => "flows",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::CONCRETE
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|c| c.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// Everything a suite run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub dim: usize,
    pub quadrature_points: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Per-check tolerance overrides keyed by check family (e.g. `gaussian.scale`).
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    /// Keep wall-clock times in reports; off by default so output is reproducible.
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            dim: 1,
            quadrature_points: 64,
            mc_samples: 100_000,
            seed: 1,
            tolerances: BTreeMap::new(),
            output_path: None,
            format: OutputFormat::Json,
            timing: false,
        }
    }
}

impl SuiteConfig {
    /// Parses JSON (if the text starts with `{`) or flat `key = value` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            Self::parse_key_values(text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse_key_values(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
        }
        match key {
            "suite" => self.suite = value.parse()?,
            "dim" => self.dim = num(key, value)?,
            "quadrature_points" => self.quadrature_points = num(key, value)?,
            "mc_samples" => self.mc_samples = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "output_path" => self.output_path = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "timing" => self.timing = num(key, value)?,
            _ => match key.strip_prefix("tolerance.") {
                Some(id) if !id.is_empty() => {
                    self.tolerances.insert(id.to_string(), num(key, value)?);
                }
                _ => return Err(Error::Config(format!("unknown key '{key}'"))),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.quadrature_points == 0 || self.mc_samples == 0 {
            return Err(Error::Config("dim, quadrature_points and mc_samples must be positive".into()));
        }
        if self.dim > 2 {
            return Err(Error::Config(format!("suites run in dimensions 1 and 2, got {}", self.dim)));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::Config(format!("tolerance {k} must be positive, got {v}")));
        }
        Ok(())
    }

    /// Tolerance for a check family, falling back to `default`.
    pub fn tol(&self, family: &str, default: f64) -> f64 {
        self.tolerances.get(family).copied().unwrap_or(default)
    }
}

/// Default tolerances by error source.
pub mod defaults {
    pub const CLOSED_FORM: f64 = 1e-9;
    pub const QUADRATURE: f64 = 1e-6;
    /// Monte Carlo checks compare in units of the standard error.
    pub const MC_SIGMAS: f64 = 3.0;
}

/// One unit of work inside a suite.
pub struct Job {
    pub id: String,
    pub run: Box<dyn Fn() -> Result<CheckReport> + Send + Sync>,
}

impl Job {
    pub fn new<F>(id: impl Into<String>, run: F) -> Self
    where
        F: Fn() -> Result<CheckReport> + Send + Sync + 'static,
    {
        Self { id: id.into(), run: Box::new(run) }
    }
}

/// Worker pool sized by `SANTALO_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs every check of the configured suite; reports are sorted by `check_id`.
///
/// A check that errors becomes a failed report carrying the message.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::CONCRETE.to_vec() } else { vec![cfg.suite] };
    let jobs: Vec<Job> = suites.iter().flat_map(|s| jobs_for(*s, cfg)).collect();
    let pool = thread_pool()?;
    let mut reports: Vec<CheckReport> = pool.install(|| jobs.par_iter().map(|job| execute(job, cfg.timing)).collect());
    reports.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(reports)
}

fn execute(job: &Job, timing: bool) -> CheckReport {
    let mut report = match (job.run)() {
        Ok(r) => r,
        Err(e) => CheckReport::builder(&job.id, "error")
            .input("error", e.to_string())
            .verdict(f64::NAN, f64::NAN, f64::NAN, false),
    };
    report.check_id = job.id.clone();
    if !timing {
        report.runtime_ms = 0;
    }
    report
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Reports as pretty JSON with a pass flag; byte-stable for fixed inputs.
pub fn reports_json(reports: &[CheckReport]) -> Result<String> {
    #[derive(Serialize)]
    struct Envelope<'a> {
        passed: bool,
        count: usize,
        reports: &'a [CheckReport],
    }
    let mut s = serde_json::to_string_pretty(&Envelope { passed: all_passed(reports), count: reports.len(), reports })?;
    s.push('\n');
    Ok(s)
}

pub fn reports_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check_id,anchor,lhs,rhs,margin,tolerance,passed,provenance,seed,runtime_ms\n");
    for r in reports {
        let provenance = serde_json::to_value(r.provenance).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.check_id,
            r.anchor,
            format_float(r.lhs),
            format_float(r.rhs),
            format_float(r.margin),
            format_float(r.tolerance),
            r.passed,
            provenance,
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.runtime_ms
        ));
    }
    out
}

/// Serializes in the configured format and writes atomically when a path is set.
pub fn emit(reports: &[CheckReport], cfg: &SuiteConfig) -> Result<String> {
    let text = match cfg.format {
        OutputFormat::Json => reports_json(reports)?,
        OutputFormat::Csv => reports_csv(reports),
    };
    if let Some(path) = &cfg.output_path {
        write_atomic(path, text.as_bytes())?;
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_config() {
        let cfg = SuiteConfig::parse("suite = gaussian\n# comment\ndim=2\ntolerance.gaussian.scale = 1e-10\n").unwrap();
        assert_eq!(cfg.suite, Suite::Gaussian);
        assert_eq!(cfg.dim, 2);
        assert_eq!(cfg.tol("gaussian.scale", 1.0), 1e-10);
    }

    #[test]
    fn json_config_rejects_unknown_keys() {
        assert!(SuiteConfig::parse(r#"{"suite": "flows", "dim": 1}"#).is_ok());
        assert!(matches!(SuiteConfig::parse(r#"{"suite": "flows", "bogus": 1}"#), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse("bogus = 1"), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse("suite = bogus"), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse("dim = 0"), Err(Error::Config(_))));
    }
}
