//! CSV row schemas and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bottleneck::CAi;
use crate::error::{Error, Result};
use crate::metrics::RegionPoint;

/// One `(scenario, c_ai, alpha)` cell. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub scenario: String,
    pub c_ai: CAi,
    /// Aperture in wavelengths; empty for baselines and independent ports.
    pub w: Option<f64>,
    pub l: usize,
    pub alpha: f64,
    pub rate_mean: f64,
    pub rate_std_error: f64,
    pub distortion_mean: f64,
    pub distortion_std_error: f64,
    /// Zero marks an analytic (non-sampled) row.
    pub trials: u64,
    pub seed: u64,
}

impl ResultRow {
    pub fn from_point(experiment: &str, point: &RegionPoint, w: Option<f64>, l: usize, seed: u64) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            scenario: point.scenario.clone(),
            c_ai: point.c_ai,
            w,
            l,
            alpha: point.alpha,
            rate_mean: point.rate.mean,
            rate_std_error: point.rate.std_error,
            distortion_mean: point.distortion.mean,
            distortion_std_error: point.distortion.std_error,
            trials: point.rate.trials,
            seed,
        }
    }
}

/// Spatial DoF summary for one geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofRow {
    pub experiment: String,
    pub scenario: String,
    pub w: f64,
    pub l: usize,
    pub epsilon: f64,
    pub numerical_rank: usize,
    pub rank_doubled_ports: usize,
    pub fitted_diversity: Option<f64>,
    pub fit_lo: Option<f64>,
    pub fit_hi: Option<f64>,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub scenario: String,
    pub index: usize,
    pub eigenvalue: f64,
}

/// Serializes rows to CSV text (header, UTF-8, LF).
pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Csv(csv::Error::from(e.into_error())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Writes rows to `path` through a temporary file and a rename.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let body = to_csv_string(rows)?;
    write_atomic(path, body.as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

pub fn parse_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Reads a results file written by any of the sweep runs.
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    read_csv(path)
}

/// Gnuplot data layout: one block per `(scenario, alpha)` in first-seen
/// order, separated by two blank lines so `index N` selects a curve.
///
/// Columns: `c_ai rate rate_se distortion distortion_se`; unbounded budgets
/// are written as `inf`.
pub fn gnuplot_blocks(rows: &[ResultRow]) -> String {
    let mut keys: Vec<(String, u64)> = Vec::new();
    for r in rows {
        let k = (r.scenario.clone(), r.alpha.to_bits());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = String::new();
    for (i, (scenario, alpha_bits)) in keys.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let alpha = f64::from_bits(*alpha_bits);
        out.push_str(&format!("# index {i}: {scenario} alpha={alpha}\n"));
        out.push_str("# c_ai rate rate_se distortion distortion_se\n");
        for r in rows
            .iter()
            .filter(|r| &r.scenario == scenario && r.alpha.to_bits() == *alpha_bits)
        {
            out.push_str(&format!(
                "{} {:.10e} {:.3e} {:.10e} {:.3e}\n",
                r.c_ai, r.rate_mean, r.rate_std_error, r.distortion_mean, r.distortion_std_error
            ));
        }
    }
    out
}
