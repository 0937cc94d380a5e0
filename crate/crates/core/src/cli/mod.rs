//! Batch verification: configuration, cached inputs, suite reports and the
//! `run-all` driver behind the command line tool.

mod suites;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{read_qseries, read_siegel, write_qseries, write_siegel};
use crate::error::{invalid, Error, Result};
use crate::jacobi::cusp_form_10_12;
use crate::maass::{sk_lift, SiegelExpansion};
use crate::qseries::{newform_onedim, EllipticEigenform};

pub use suites::{dk_rows, kohnen_radial_series, sign_stability, DkRow, SignStability, SUITES};

/// Run configuration, read from JSON. Missing fields take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Lift weights, each 10 or 12.
    pub weights: Vec<u32>,
    /// det4 bound of the cached lifts.
    pub detmax4: u64,
    /// Largest prime in the radial suite.
    pub pmax: u64,
    /// Range of the prime scans and of the elliptic eigenvalue streams.
    pub xmax: u64,
    /// det4 bound of the (disc, content) grouping check.
    pub skkey_detmax4: u64,
    /// Input det4 bound for T(p) on the lifts.
    pub hecke_detmax4: u64,
    /// det4 bound for the weight-20 computation.
    pub nonlift_detmax4: u64,
    /// Largest n, m in the Witt identity for the Eisenstein series.
    pub witt_nmax: u64,
    /// det4 bound of the Das–Kohnen tables.
    pub dk_detmax4: u64,
    /// Largest prime in the packet sign and combination checks.
    pub cap_pmax: u64,
    /// Directory for reports and tables.
    pub output_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            weights: vec![10, 12],
            detmax4: 4 * 47 * 47,
            pmax: 47,
            xmax: 10_000,
            skkey_detmax4: 800,
            hecke_detmax4: 3600,
            nonlift_detmax4: 144,
            witt_nmax: 8,
            dk_detmax4: 800,
            cap_pmax: 1000,
            output_dir: None,
        }
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|k| *k != 10 && *k != 12) {
            return invalid("lift weights must be 10 or 12");
        }
        if self.pmax < 2 || self.xmax < 100 {
            return invalid("pmax must be at least 2 and xmax at least 100");
        }
        Ok(())
    }

    /// Elliptic precision needed by the scans and the radial suite.
    fn elliptic_precision(&self) -> usize {
        self.xmax.max(self.pmax).max(self.cap_pmax) as usize
    }
}

/// One failing or noteworthy case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseDetail {
    pub case: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of one suite. `runtime_ms` is left out of the serialized form
/// so that report files do not depend on timing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: u64,
    pub failures: u64,
    pub details: Vec<CaseDetail>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub exit_code: i32,
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.exit_code == 0
    }
}

/// Accumulates cases while a suite runs.
#[derive(Debug, Default)]
pub struct Recorder {
    cases: u64,
    failures: u64,
    details: Vec<CaseDetail>,
    notes: Vec<String>,
    artifacts: Vec<(String, String)>,
}

const MAX_DETAILS: usize = 50;

impl Recorder {
    pub fn check(&mut self, case: impl Display, expected: impl Display, got: impl Display, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.details.len() < MAX_DETAILS {
                self.details.push(CaseDetail { case: case.to_string(), expected: expected.to_string(), got: got.to_string() });
            }
        }
    }

    pub fn check_eq<T: PartialEq + Display>(&mut self, case: impl Display, expected: &T, got: &T) {
        self.check(case, expected, got, expected == got);
    }

    /// Counts cases that passed without recording them one by one.
    pub fn passed(&mut self, n: u64) {
        self.cases += n;
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// A file written to the output directory by `run-all`.
    pub fn artifact(&mut self, name: impl Into<String>, content: String) {
        self.artifacts.push((name.into(), content));
    }
}

/// Where a cached input came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CacheStatus {
    Built,
    Loaded,
    Uncached,
}

/// Inputs shared between suites.
pub struct Context {
    pub config: Config,
    lifts: BTreeMap<u32, std::result::Result<SiegelExpansion, String>>,
    elliptic: BTreeMap<u32, std::result::Result<EllipticEigenform, String>>,
    pub cache_log: Vec<String>,
}

fn cached<T>(
    path: Option<PathBuf>,
    read: impl Fn(&Path) -> Result<T>,
    write: impl Fn(&Path, &T) -> Result<()>,
    build: impl Fn() -> Result<T>,
) -> (Result<T>, CacheStatus) {
    let Some(path) = path else {
        return (build(), CacheStatus::Uncached);
    };
    if path.exists() {
        return (read(&path), CacheStatus::Loaded);
    }
    let value = build();
    if let Ok(v) = &value {
        if let Err(e) = write(&path, v) {
            return (Err(e), CacheStatus::Built);
        }
    }
    (value, CacheStatus::Built)
}

pub fn lift_cache_name(k: u32, detmax4: u64) -> String {
    format!("lift-k{k}-d{detmax4}.siegel")
}

impl Context {
    /// Builds or loads the lifts and elliptic streams named by the config.
    pub fn prepare(config: Config, cache_dir: Option<&Path>) -> Result<Self> {
        config.validate()?;
        if let Some(dir) = cache_dir {
            std::fs::create_dir_all(dir)?;
        }
        let prec = config.elliptic_precision();
        let mut weights: Vec<u32> = config.weights.iter().map(|k| 2 * k - 2).collect();
        weights.extend([12, 18, 22]);
        weights.sort_unstable();
        weights.dedup();

        let detmax4 = config.detmax4;
        let lift_jobs: Vec<_> = config
            .weights
            .par_iter()
            .map(|&k| {
                let t = Instant::now();
                let path = cache_dir.map(|d| d.join(lift_cache_name(k, detmax4)));
                let (v, status) = cached(path, read_siegel, write_siegel, || {
                    sk_lift(&cusp_form_10_12(k, detmax4)?, detmax4)
                });
                (k, v.map_err(|e| e.to_string()), status, t.elapsed().as_millis())
            })
            .collect();
        let elliptic_jobs: Vec<_> = weights
            .par_iter()
            .map(|&w| {
                let t = Instant::now();
                let path = cache_dir.map(|d| d.join(format!("newform-w{w}-n{prec}.qseries")));
                let (v, status) = cached(
                    path,
                    |p| {
                        let (weight, s) = read_qseries(p)?;
                        EllipticEigenform::new(weight, s)
                    },
                    |p, f: &EllipticEigenform| write_qseries(p, f.weight(), f.series()),
                    || newform_onedim(w, prec),
                );
                (w, v.map_err(|e| e.to_string()), status, t.elapsed().as_millis())
            })
            .collect();

        let mut cache_log = Vec::new();
        let mut lifts = BTreeMap::new();
        for (k, v, status, ms) in lift_jobs {
            cache_log.push(format!("lift k={k} detmax4={detmax4}: {status:?} in {ms} ms"));
            lifts.insert(k, v);
        }
        let mut elliptic = BTreeMap::new();
        for (w, v, status, ms) in elliptic_jobs {
            cache_log.push(format!("newform weight {w} to q^{prec}: {status:?} in {ms} ms"));
            elliptic.insert(w, v);
        }
        Ok(Self { config, lifts, elliptic, cache_log })
    }

    pub fn lift(&self, k: u32) -> Result<&SiegelExpansion> {
        match self.lifts.get(&k) {
            Some(Ok(f)) => Ok(f),
            Some(Err(e)) => Err(Error::Internal(format!("weight {k} lift unavailable: {e}"))),
            None => invalid(format!("weight {k} is not among the configured lift weights")),
        }
    }

    pub fn newform(&self, weight: u32) -> Result<&EllipticEigenform> {
        match self.elliptic.get(&weight) {
            Some(Ok(f)) => Ok(f),
            Some(Err(e)) => Err(Error::Internal(format!("weight {weight} newform unavailable: {e}"))),
            None => invalid(format!("weight {weight} newform was not prepared")),
        }
    }
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(name, _)| *name).collect()
}

/// Runs one suite by name.
pub fn run_suite(ctx: &Context, name: &str) -> Result<(VerificationReport, Vec<(String, String)>)> {
    let Some((_, f)) = SUITES.iter().find(|(n, _)| *n == name) else {
        return invalid(format!("unknown suite {name}; available: {}", suite_names().join(", ")));
    };
    let start = Instant::now();
    let mut rec = Recorder::default();
    let result = f(ctx, &mut rec);
    let runtime_ms = start.elapsed().as_millis();
    let (error, exit_code) = match &result {
        Err(e) => (Some(e.to_string()), e.exit_code()),
        Ok(()) if rec.failures > 0 => (None, 2),
        Ok(()) => (None, 0),
    };
    let report = VerificationReport {
        suite: name.to_string(),
        cases: rec.cases,
        failures: rec.failures,
        details: rec.details,
        notes: rec.notes,
        error,
        exit_code,
        runtime_ms,
    };
    Ok((report, rec.artifacts))
}

/// Runs every suite and writes `reports.json` plus the suite tables into
/// the output directory, if one is configured.
pub fn run_all(ctx: &Context) -> Result<Vec<VerificationReport>> {
    let results: Vec<_> = SUITES.par_iter().map(|(name, _)| run_suite(ctx, name)).collect();
    let mut reports = Vec::new();
    let mut artifacts = Vec::new();
    for r in results {
        let (report, files) = r?;
        reports.push(report);
        artifacts.extend(files);
    }
    if let Some(dir) = &ctx.config.output_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("reports.json"), serde_json::to_string_pretty(&reports)? + "\n")?;
        for (name, content) in artifacts {
            std::fs::write(dir.join(name), content)?;
        }
    }
    Ok(reports)
}

/// Zero when every report passed, otherwise the largest suite code.
pub fn exit_status(reports: &[VerificationReport]) -> i32 {
    reports.iter().map(|r| r.exit_code).max().unwrap_or(0)
}
