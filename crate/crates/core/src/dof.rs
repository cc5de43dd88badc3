//! Spatial degrees of freedom and diversity order.
//!
//! The effective number of independent branches of a fluid antenna of
//! length `W` is the numerical rank `L'(W)` of its Jakes correlation. It also
//! sets the small-gain decay of the selected-gain CDF,
//! `P(gamma* < x) ~ x^L'`, which is what [`fit_diversity_order`] measures.

use serde::Serialize;

use crate::channel::{FasGeometry, FasSource, SpatialCorrelation};
use crate::error::{Error, Result};
use crate::montecarlo::{collect_samples, Workers};

pub const DEFAULT_RANK_EPSILON: f64 = 1e-6;

/// CDF values eligible for a diversity fit.
pub const FIT_CDF_RANGE: (f64, f64) = (1e-4, 1e-1);

const SLOPE_SPREAD: f64 = 0.15;

/// Count of eigenvalues strictly above `epsilon * lambda_max`.
pub fn numerical_rank(corr: &SpatialCorrelation, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("rank threshold must lie in (0, 1), got {epsilon}")));
    }
    let ev = corr.eigenvalues();
    let cut = epsilon * ev[0];
    Ok(ev.iter().filter(|&&v| v > cut).count())
}

/// One point of an empirical outage curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutagePoint {
    pub threshold: f64,
    pub cdf: f64,
    pub std_error: f64,
}

/// Empirical `P(gamma* < x)` at each threshold, with binomial standard errors.
pub fn outage_curve(samples: &[f64], thresholds: &[f64]) -> Result<Vec<OutagePoint>> {
    if samples.is_empty() {
        return Err(Error::domain("outage curve needs at least one sample"));
    }
    if let Some(t) = thresholds.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::domain(format!("thresholds must be positive, got {t}")));
    }
    if samples.len() < 100_000 {
        log::warn!("outage curve from only {} samples", samples.len());
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&x| {
            let below = sorted.partition_point(|&s| s < x) as f64;
            let p = below / n;
            OutagePoint {
                threshold: x,
                cdf: p,
                std_error: (p * (1.0 - p) / n).sqrt(),
            }
        })
        .collect())
}

/// `count` log-spaced thresholds between the empirical quantiles at the
/// ends of [`FIT_CDF_RANGE`].
pub fn fit_grid(samples: &[f64], count: usize) -> Result<Vec<f64>> {
    if samples.is_empty() || count < 2 {
        return Err(Error::domain("need samples and at least two grid points"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((p * sorted.len() as f64) as usize).min(sorted.len() - 1)];
    let lo = q(FIT_CDF_RANGE.0).max(f64::MIN_POSITIVE);
    let hi = q(FIT_CDF_RANGE.1);
    if !(hi > lo) {
        return Err(Error::Fit("degenerate quantile range".into()));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

/// Least-squares log-log slope of an outage curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiversityFit {
    pub slope: f64,
    /// Gain interval `[x_lo, x_hi]` of the points used.
    pub fit_range: (f64, f64),
    pub points: usize,
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Fits `log F = slope * log x + c` over the small-outage part of `curve`.
///
/// Only points with CDF in [`FIT_CDF_RANGE`] are eligible. Among those, the
/// largest contiguous window whose consecutive local slopes vary by less
/// than 15% of their mean is used (deepest window on ties); if no window of
/// at least four points qualifies, the four deepest points are used.
pub fn fit_diversity_order(curve: &[OutagePoint]) -> Result<DiversityFit> {
    let mut pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.cdf >= FIT_CDF_RANGE.0 && p.cdf <= FIT_CDF_RANGE.1 && p.threshold > 0.0)
        .map(|p| (p.threshold.ln(), p.cdf.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.1 == b.1);
    if pts.len() < 4 {
        return Err(Error::Fit(format!(
            "only {} points with outage in [{:e}, {:e}]; use more trials or widen the threshold grid",
            pts.len(),
            FIT_CDF_RANGE.0,
            FIT_CDF_RANGE.1
        )));
    }

    let local: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for start in 0..local.len() {
        for end in (start + 3)..=local.len() {
            // window of local slopes [start, end) spans points start..=end
            let s = &local[start..end];
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            let spread = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - s.iter().cloned().fold(f64::INFINITY, f64::min);
            if mean > 0.0 && spread < SLOPE_SPREAD * mean {
                let better = match best {
                    None => true,
                    Some((bs, be)) => end - start > be - bs,
                };
                if better {
                    best = Some((start, end));
                }
            }
        }
    }
    let window = match best {
        Some((s, e)) => &pts[s..=e],
        None => {
            log::debug!("no stable slope window, using the four deepest points");
            &pts[..4]
        }
    };
    let slope = ls_slope(window);
    if !(slope > 0.0) {
        return Err(Error::Fit(format!("non-positive fitted slope {slope}")));
    }
    Ok(DiversityFit {
        slope,
        fit_range: (window[0].0.exp(), window[window.len() - 1].0.exp()),
        points: window.len(),
    })
}

/// Draws `trials` samples of `max_l |h_c,l|^2`.
pub fn selected_gain_samples(source: &FasSource, trials: u64, seed: u64, workers: Workers) -> Result<Vec<f64>> {
    collect_samples(trials, seed, workers, Vec::new, |rng, w| source.max_comm_gain(rng, w))
}

/// Spectrum, numerical rank and fitted diversity for one geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofReport {
    pub numerical_rank: usize,
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub fitted_diversity: f64,
    pub fit_range: (f64, f64),
}

/// Builds a [`DofReport`] from the correlation and selected-gain samples.
pub fn dof_report(corr: &SpatialCorrelation, epsilon: f64, samples: &[f64], grid_points: usize) -> Result<DofReport> {
    let rank = numerical_rank(corr, epsilon)?;
    let grid = fit_grid(samples, grid_points)?;
    let fit = fit_diversity_order(&outage_curve(samples, &grid)?)?;
    Ok(DofReport {
        numerical_rank: rank,
        eigenvalues: corr.eigenvalues().to_vec(),
        threshold: epsilon,
        fitted_diversity: fit.slope,
        fit_range: fit.fit_range,
    })
}

/// Rank at `L` ports and at `2L` ports for one aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthRank {
    pub length_wavelengths: f64,
    pub rank: usize,
    pub rank_doubled_ports: usize,
}

impl LengthRank {
    pub fn saturated(&self) -> bool {
        self.rank == self.rank_doubled_ports
    }
}

/// `L'(W)` across apertures at fixed `L`, plus the `2L` saturation check.
pub fn dof_vs_length(lengths: &[f64], num_ports: usize, epsilon: f64) -> Result<Vec<LengthRank>> {
    lengths
        .iter()
        .map(|&w| {
            let at = |l| -> Result<usize> {
                let g = FasGeometry::new(l, w, 1.0)?;
                numerical_rank(&SpatialCorrelation::jakes(&g)?, epsilon)
            };
            Ok(LengthRank {
                length_wavelengths: w,
                rank: at(num_ports)?,
                rank_doubled_ports: at(2 * num_ports)?,
            })
        })
        .collect()
}
