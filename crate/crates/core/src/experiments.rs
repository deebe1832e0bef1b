//! Config-driven Monte Carlo runs over a grid of sample sizes.
//!
//! Each `(n, replicate)` cell draws its sample from a stream keyed by
//! [`rng::cell_seed`], so a cell's row depends only on the config and the
//! cell, never on the thread count or scheduling. Rows are sorted by
//! `(n, replicate)` before they are returned or written.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, DiagnosticsOptions};
use crate::distributions::{BallMassPrecision, DistributionSpec, Sample};
use crate::error::{Error, Result};
use crate::estimators;
use crate::nn::Backend;
use crate::numeric::sorted_mean;
use crate::rng;

/// Output CSV columns, in order.
pub const CSV_HEADER: [&str; 11] = [
    "n",
    "replicate",
    "h_n",
    "true_entropy",
    "abs_error",
    "m_n",
    "tilde_h_n",
    "ball_mass_sum",
    "log_tail",
    "ell_n",
    "wall_time_ms",
];

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Which per-row diagnostics to compute.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticToggles {
    pub m_n: bool,
    pub tilde_h_n: bool,
    pub ball_mass_sum: bool,
    pub log_tail: bool,
    /// Always on for the counterexample.
    pub ell_n: bool,
    /// Monte Carlo ball masses for laws without an exact form.
    pub monte_carlo: Option<BallMassPrecision>,
}

impl DiagnosticToggles {
    fn needs_ball_mass(&self) -> bool {
        self.m_n || self.tilde_h_n || self.ball_mass_sum
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: DistributionSpec,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub diagnostics: DiagnosticToggles,
    pub output_path: PathBuf,
    /// Off by default so that reruns produce byte-identical CSV files.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        self.spec.validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if self.n_grid.is_empty() {
            return bad("n_grid is empty".into());
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 2) {
            return bad(format!("n_grid entry {n} is below 2"));
        }
        if let Some(w) = self.n_grid.windows(2).find(|w| w[0] >= w[1]) {
            return bad(format!("n_grid must be strictly ascending, found {} then {}", w[0], w[1]));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.output_path.as_os_str().is_empty() {
            return bad("output_path is empty".into());
        }
        let counterexample = matches!(self.spec, DistributionSpec::Counterexample { .. });
        if self.diagnostics.ell_n && self.spec.dim() != 1 {
            return bad("ell_n needs a one-dimensional spec".into());
        }
        if self.diagnostics.needs_ball_mass()
            && !counterexample
            && !self.spec.has_exact_ball_mass()
            && self.diagnostics.monte_carlo.is_none()
        {
            return bad(format!(
                "{} has no exact ball mass; set diagnostics.monte_carlo",
                self.spec.label()
            ));
        }
        Ok(())
    }

    /// Path of the run manifest: the CSV path with `.manifest.json` appended.
    pub fn manifest_path(&self) -> PathBuf {
        let mut s = self.output_path.clone().into_os_string();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

/// One `(n, replicate)` cell. `h_n` is `None` when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub replicate: usize,
    pub h_n: Option<f64>,
    pub true_entropy: f64,
    pub abs_error: Option<f64>,
    pub m_n: Option<f64>,
    pub tilde_h_n: Option<f64>,
    pub ball_mass_sum: Option<f64>,
    pub log_tail: Option<f64>,
    pub ell_n: Option<f64>,
    pub wall_time_ms: Option<f64>,
    /// Failure message; kept in the manifest, not the CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        self.h_n.is_none()
    }

    fn empty(n: usize, replicate: usize, true_entropy: f64) -> Self {
        ResultRow {
            n,
            replicate,
            h_n: None,
            true_entropy,
            abs_error: None,
            m_n: None,
            tilde_h_n: None,
            ball_mass_sum: None,
            log_tail: None,
            ell_n: None,
            wall_time_ms: None,
            error: None,
        }
    }
}

/// Per-`n` aggregate over the successful rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub mean_h: f64,
    /// Lower median for even counts.
    pub median_h: f64,
    /// Sample standard deviation; zero for a single row.
    pub sd_h: f64,
    pub mean_abs_error: Option<f64>,
    pub median_ell: Option<f64>,
    pub count: usize,
    pub failed: usize,
}

/// Computes one cell in isolation.
pub fn run_cell(config: &ExperimentConfig, n: usize, replicate: usize) -> ResultRow {
    let started = Instant::now();
    let true_entropy = config.spec.exact_entropy();
    let mut row = ResultRow::empty(n, replicate, true_entropy);
    if let Err(e) = fill_cell(config, &mut row) {
        row = ResultRow::empty(n, replicate, true_entropy);
        row.error = Some(e.to_string());
    }
    if config.record_wall_time {
        row.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    row
}

fn fill_cell(config: &ExperimentConfig, row: &mut ResultRow) -> Result<()> {
    let seed = rng::cell_seed(config.seed, row.n, row.replicate);
    let sample = config.spec.sample(row.n, seed)?;
    let toggles = &config.diagnostics;
    let h_n = match &sample {
        Sample::Structured(s) => {
            row.ell_n = Some(estimators::ell_statistic_logdomain(&s.points, &s.intervals)?);
            estimators::kl_entropy_logdomain(&s.points, &s.intervals)?.value
        }
        Sample::Points(points) => {
            if toggles.ell_n {
                row.ell_n = Some(estimators::ell_statistic(points, config.backend)?);
            }
            estimators::kl_entropy(points, config.backend)?.value
        }
    };
    if toggles.needs_ball_mass() {
        let opts = DiagnosticsOptions {
            backend: config.backend,
            monte_carlo: toggles.monte_carlo.map(|p| BallMassPrecision {
                seed: rng::derive_seed(seed, &[rng::purpose::BALL_MASS, p.seed]),
                ..p
            }),
        };
        let stats = diagnostics::ball_statistics(&sample, &config.spec, &opts)?;
        row.m_n = toggles.m_n.then_some(stats.m_n);
        row.tilde_h_n = toggles.tilde_h_n.then_some(stats.tilde_h_n);
        row.ball_mass_sum = toggles.ball_mass_sum.then_some(stats.ball_mass_sum);
    }
    if toggles.log_tail {
        row.log_tail = Some(diagnostics::empirical_log_tail(&sample));
    }
    row.h_n = Some(h_n);
    if row.true_entropy.is_finite() {
        row.abs_error = Some((h_n - row.true_entropy).abs());
    }
    Ok(())
}

fn run_cells(config: &ExperimentConfig, threads: usize) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let cells: Vec<(usize, usize)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.replicates).map(move |r| (n, r)))
        .collect();
    let mut rows: Vec<ResultRow> =
        pool.install(|| cells.par_iter().map(|&(n, r)| run_cell(config, n, r)).collect());
    rows.sort_by_key(|r| (r.n, r.replicate));
    Ok(rows)
}

/// Convergence runs for every law except the counterexample.
/// `threads = 0` uses all cores.
pub fn run_convergence(config: &ExperimentConfig, threads: usize) -> Result<Vec<ResultRow>> {
    if matches!(config.spec, DistributionSpec::Counterexample { .. }) {
        return Err(Error::InvalidConfig("use run_divergence for the counterexample".into()));
    }
    run_cells(config, threads)
}

/// Log-domain runs on the counterexample; every row carries `ell_n` and
/// a true entropy of zero.
pub fn run_divergence(config: &ExperimentConfig, threads: usize) -> Result<Vec<ResultRow>> {
    if !matches!(config.spec, DistributionSpec::Counterexample { .. }) {
        return Err(Error::InvalidConfig("run_divergence needs the counterexample spec".into()));
    }
    run_cells(config, threads)
}

/// Dispatches to [`run_convergence`] or [`run_divergence`].
pub fn run(config: &ExperimentConfig, threads: usize) -> Result<Vec<ResultRow>> {
    run_cells(config, threads)
}

/// Groups rows by `n` in ascending order. Failed rows are counted and
/// excluded from every statistic.
pub fn summarize(rows: &[ResultRow]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    Ok(ns
        .into_iter()
        .map(|n| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.n == n).collect();
            let h: Vec<f64> = group.iter().filter_map(|r| r.h_n).collect();
            let err: Vec<f64> = group.iter().filter_map(|r| r.abs_error).collect();
            let ell: Vec<f64> = group.iter().filter_map(|r| r.ell_n).collect();
            SummaryRow {
                n,
                mean_h: sorted_mean(&h),
                median_h: lower_median(&h).unwrap_or(f64::NAN),
                sd_h: sample_sd(&h),
                mean_abs_error: (!err.is_empty()).then(|| sorted_mean(&err)),
                median_ell: lower_median(&ell),
                count: h.len(),
                failed: group.len() - h.len(),
            }
        })
        .collect())
}

/// Lower-middle median: element `(m − 1) / 2` of the sorted values.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

/// Sample standard deviation, scaled so values near 1e150 do not overflow
/// when squared.
pub fn sample_sd(values: &[f64]) -> f64 {
    match values.len() {
        0 => f64::NAN,
        1 => 0.0,
        m => {
            let mean = sorted_mean(values);
            let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
            let scale = dev.iter().fold(0.0_f64, |s, d| s.max(d.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            let sq: Vec<f64> = dev.iter().map(|d| (d / scale) * (d / scale)).collect();
            scale * (sorted_mean(&sq) * m as f64 / (m - 1) as f64).sqrt()
        }
    }
}

/// Seventeen significant digits, exponent form; empty for `None`.
fn format_field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Renders rows in the documented CSV schema.
pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.replicate.to_string(),
            format_field(r.h_n),
            format_field(Some(r.true_entropy)),
            format_field(r.abs_error),
            format_field(r.m_n),
            format_field(r.tilde_h_n),
            format_field(r.ball_mass_sum),
            format_field(r.log_tail),
            format_field(r.ell_n),
            format_field(r.wall_time_ms),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}

/// Parses a CSV in the documented schema. Empty cells read as `None`.
pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut rd = csv::Reader::from_reader(reader);
    let header = rd.headers().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidConfig(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    rd.records()
        .enumerate()
        .map(|(k, rec)| {
            let line = k + 2;
            let rec = rec.map_err(|e| Error::InvalidConfig(format!("line {line}: {e}")))?;
            let num = |i: usize| -> Result<Option<f64>> {
                let s = rec.get(i).unwrap_or("");
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::InvalidConfig(format!("line {line}: bad {} value {s:?}", CSV_HEADER[i])))
            };
            let int = |i: usize| -> Result<usize> {
                rec.get(i)
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("line {line}: bad {}", CSV_HEADER[i])))
            };
            Ok(ResultRow {
                n: int(0)?,
                replicate: int(1)?,
                h_n: num(2)?,
                true_entropy: num(3)?
                    .ok_or_else(|| Error::InvalidConfig(format!("line {line}: missing true_entropy")))?,
                abs_error: num(4)?,
                m_n: num(5)?,
                tilde_h_n: num(6)?,
                ball_mass_sum: num(7)?,
                log_tail: num(8)?,
                ell_n: num(9)?,
                wall_time_ms: num(10)?,
                error: None,
            })
        })
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = fs::File::open(path).map_err(|e| io_error(path, e))?;
    parse_csv(file)
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(contents).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedCell {
    pub n: usize,
    pub replicate: usize,
    pub error: String,
}

/// Sidecar JSON written next to the CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub code_version: String,
    pub config: ExperimentConfig,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub rows: usize,
    pub failed_cells: Vec<FailedCell>,
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Everything produced by [`execute`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Runs the experiment, writes the CSV and its manifest, and summarizes.
pub fn execute(config: &ExperimentConfig, threads: usize) -> Result<RunOutput> {
    let started = unix_ms();
    let rows = run(config, threads)?;
    let summary = summarize(&rows)?;
    write_atomic(&config.output_path, to_csv_string(&rows).as_bytes())?;
    let manifest = RunManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        rows: rows.len(),
        failed_cells: rows
            .iter()
            .filter_map(|r| {
                r.error.as_ref().map(|e| FailedCell {
                    n: r.n,
                    replicate: r.replicate,
                    error: e.clone(),
                })
            })
            .collect(),
    };
    let manifest_path = config.manifest_path();
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&manifest_path, json.as_bytes())?;
    Ok(RunOutput {
        rows,
        summary,
        csv_path: config.output_path.clone(),
        manifest_path,
    })
}
