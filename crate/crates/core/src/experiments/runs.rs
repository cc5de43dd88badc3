//! Sweep runners. Each returns self-describing rows; writing is separate.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineSource;
use crate::bottleneck::{ai_distortion_floor, ai_rate_ceiling, AiBudget, CAi};
use crate::channel::{FasGeometry, FasSource, GainSource};
use crate::dof::{
    dof_report, numerical_rank, selected_gain_samples, DofReport,
};
use crate::error::Result;
use crate::metrics::{estimate_grid, independent_ports_quadrature, time_sharing_frontier, Estimation, RegionPoint};
use crate::montecarlo::{MonteCarloEstimate, Workers};
use crate::channel::SpatialCorrelation;

use super::config::SweepConfig;
use super::rows::{DofRow, EigenRow, ResultRow};

pub const RATE_SWEEP: &str = "rate-sweep";
pub const DISTORTION_SWEEP: &str = "distortion-sweep";
pub const FRONTIER: &str = "frontier";
pub const FRONTIER_HULL: &str = "frontier-hull";
pub const VALIDATION: &str = "validate";
pub const DOF: &str = "dof";

/// Scenario tag of the analytic AI-ceiling rows.
pub const AI_BOUND: &str = "ai-bound";

/// Selection weights used by the frontier when the config gives one weight.
pub const DEFAULT_FRONTIER_ALPHAS: [f64; 11] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0];

/// Per-scenario stream seed: the master seed mixed with a hash of the tag,
/// so scenarios draw independent realizations while staying reproducible.
pub fn scenario_seed(master_seed: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    master_seed ^ h
}

/// `path` with `suffix` inserted before the extension: `a/out.csv` ->
/// `a/out.hull.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{suffix}"),
    };
    path.with_file_name(name)
}

struct Scenario {
    w: Option<f64>,
    l: usize,
    kind: Source,
}

enum Source {
    Fas(FasSource),
    Baseline(BaselineSource),
}

impl Scenario {
    fn tag(&self) -> String {
        match &self.kind {
            Source::Fas(s) => s.tag(),
            Source::Baseline(s) => s.tag(),
        }
    }

    fn grid(&self, est: &Estimation, budgets: &[CAi], alphas: &[f64]) -> Result<Vec<RegionPoint>> {
        match &self.kind {
            Source::Fas(s) => estimate_grid(s, est, budgets, alphas),
            Source::Baseline(s) => estimate_grid(s, est, budgets, alphas),
        }
    }
}

fn fas_scenario(g: &FasGeometry, rho_cs: f64) -> Result<Scenario> {
    Ok(Scenario {
        w: Some(g.length_wavelengths),
        l: g.num_ports,
        kind: Source::Fas(FasSource::jakes(g, rho_cs)?),
    })
}

fn scenarios(cfg: &SweepConfig) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for g in &cfg.geometries {
        out.push(fas_scenario(g, cfg.rho_cs)?);
    }
    for &k in &cfg.baselines {
        out.push(Scenario {
            w: None,
            l: k.antennas().1,
            kind: Source::Baseline(BaselineSource::new(k, cfg.rho_cs)?),
        });
    }
    Ok(out)
}

fn estimation(cfg: &SweepConfig, tag: &str, workers: Workers) -> Result<Estimation> {
    Ok(Estimation {
        params: cfg.params()?,
        trials: cfg.trials,
        seed: scenario_seed(cfg.master_seed, tag),
        workers,
    })
}

fn exact(mean: f64) -> MonteCarloEstimate {
    MonteCarloEstimate { mean, std_error: 0.0, trials: 0 }
}

fn ai_bound_rows(cfg: &SweepConfig, experiment: &str) -> Result<Vec<ResultRow>> {
    let sigma = cfg.params()?.sigma_theta_sq;
    cfg.budgets
        .iter()
        .filter(|c| c.is_finite())
        .map(|&c| {
            let point = RegionPoint {
                rate: exact(ai_rate_ceiling(c)?),
                distortion: exact(ai_distortion_floor(sigma, c)?),
                c_ai: c,
                scenario: AI_BOUND.to_string(),
                alpha: 1.0,
            };
            Ok(ResultRow::from_point(experiment, &point, None, 0, cfg.master_seed))
        })
        .collect()
}

fn budget_sweep(cfg: &SweepConfig, experiment: &str, workers: Workers) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for sc in scenarios(cfg)? {
        let tag = sc.tag();
        let est = estimation(cfg, &tag, workers)?;
        log::info!("{experiment}: {tag}, {} trials", est.trials);
        for p in sc.grid(&est, &cfg.budgets, &cfg.alpha_grid)? {
            rows.push(ResultRow::from_point(experiment, &p, sc.w, sc.l, est.seed));
        }
    }
    rows.extend(ai_bound_rows(cfg, experiment)?);
    Ok(rows)
}

/// Rate against the AI budget for every configured scenario, plus the
/// `log2(1 + Gamma_AI) = C_AI` ceiling rows.
pub fn run_rate_sweep(cfg: &SweepConfig, workers: Workers) -> Result<Vec<ResultRow>> {
    budget_sweep(cfg, RATE_SWEEP, workers)
}

/// Distortion against the AI budget, plus the `sigma^2 / 2^C_AI` floor rows.
pub fn run_distortion_sweep(cfg: &SweepConfig, workers: Workers) -> Result<Vec<ResultRow>> {
    budget_sweep(cfg, DISTORTION_SWEEP, workers)
}

/// Frontier points and their time-sharing closure.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierOutput {
    pub rows: Vec<ResultRow>,
    pub hull: Vec<ResultRow>,
}

/// Rate-distortion trade-off traced by the selection weight. Baselines
/// contribute a single point per budget.
pub fn run_frontier(cfg: &SweepConfig, workers: Workers) -> Result<FrontierOutput> {
    cfg.validate()?;
    let alphas: Vec<f64> = if cfg.alpha_grid.len() > 1 {
        cfg.alpha_grid.clone()
    } else {
        log::info!("frontier: single-weight alpha_grid, using the 11-point default");
        DEFAULT_FRONTIER_ALPHAS.to_vec()
    };
    let mut rows = Vec::new();
    let mut hull = Vec::new();
    for sc in scenarios(cfg)? {
        let tag = sc.tag();
        let est = estimation(cfg, &tag, workers)?;
        let weights: &[f64] = match sc.kind {
            Source::Fas(_) => &alphas,
            Source::Baseline(_) => &[1.0],
        };
        log::info!("frontier: {tag}, {} weights, {} trials", weights.len(), est.trials);
        let points = sc.grid(&est, &cfg.budgets, weights)?;
        for &c in &cfg.budgets {
            let cell: Vec<RegionPoint> = points.iter().filter(|p| p.c_ai == c).cloned().collect();
            for p in time_sharing_frontier(&cell) {
                hull.push(ResultRow::from_point(FRONTIER_HULL, &p, sc.w, sc.l, est.seed));
            }
        }
        rows.extend(points.iter().map(|p| ResultRow::from_point(FRONTIER, p, sc.w, sc.l, est.seed)));
    }
    Ok(FrontierOutput { rows, hull })
}

/// Monte Carlo against quadrature for one `(L, c_ai)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub l: usize,
    pub c_ai: CAi,
    pub rate_gap: f64,
    pub rate_tolerance: f64,
    pub distortion_gap: f64,
    pub distortion_tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutput {
    pub rows: Vec<ResultRow>,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationOutput {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Agreement band for a Monte Carlo estimate against an exact value.
pub fn validation_tolerance(std_error: f64) -> f64 {
    (3.0 * std_error).max(1e-3)
}

/// Independent-port scenarios simulated and integrated side by side.
pub fn run_validation(cfg: &SweepConfig, workers: Workers) -> Result<ValidationOutput> {
    cfg.validate()?;
    let params = cfg.params()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &l in &cfg.independent_ports {
        let source = FasSource::independent(l, 0.0)?;
        let tag = source.tag();
        let est = estimation(cfg, &tag, workers)?;
        log::info!("validate: {tag}, {} trials", est.trials);
        let points = estimate_grid(&source, &est, &cfg.budgets, &[1.0])?;
        for p in points {
            let (rate, distortion) = independent_ports_quadrature(l, &params, &AiBudget::new(p.c_ai, params.p)?)?;
            let exact_point = RegionPoint {
                rate: exact(rate),
                distortion: exact(distortion),
                c_ai: p.c_ai,
                scenario: format!("{tag}-quadrature"),
                alpha: 1.0,
            };
            let rate_gap = (p.rate.mean - rate).abs();
            let distortion_gap = (p.distortion.mean - distortion).abs();
            let rate_tolerance = validation_tolerance(p.rate.std_error);
            let distortion_tolerance = validation_tolerance(p.distortion.std_error);
            checks.push(ValidationCheck {
                l,
                c_ai: p.c_ai,
                rate_gap,
                rate_tolerance,
                distortion_gap,
                distortion_tolerance,
                pass: rate_gap < rate_tolerance && distortion_gap < distortion_tolerance,
            });
            rows.push(ResultRow::from_point(VALIDATION, &p, None, l, est.seed));
            rows.push(ResultRow::from_point(VALIDATION, &exact_point, None, l, est.seed));
        }
    }
    Ok(ValidationOutput { rows, checks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofOutput {
    pub rows: Vec<DofRow>,
    pub eigenvalues: Vec<EigenRow>,
    pub reports: Vec<DofReport>,
}

/// Numerical rank, `2L` saturation rank and fitted outage slope for every
/// configured geometry. `trials` is the selected-gain sample count.
pub fn run_dof_report(cfg: &SweepConfig, workers: Workers) -> Result<DofOutput> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut reports = Vec::new();
    for g in &cfg.geometries {
        let source = FasSource::jakes(g, 0.0)?;
        let tag = source.tag();
        let seed = scenario_seed(cfg.master_seed, &tag);
        log::info!("dof: {tag}, {} samples", cfg.trials);
        let samples = selected_gain_samples(&source, cfg.trials, seed, workers)?;
        let doubled = FasGeometry::new(2 * g.num_ports, g.length_wavelengths, g.wavelength)?;
        let rank_doubled = numerical_rank(&SpatialCorrelation::jakes(&doubled)?, cfg.rank_epsilon)?;
        let (fit, report) = match dof_report(source.correlation(), cfg.rank_epsilon, &samples, cfg.outage_grid_points) {
            Ok(r) => (Some((r.fitted_diversity, r.fit_range)), Some(r)),
            Err(e) => {
                log::warn!("dof: {tag}: no diversity fit ({e})");
                (None, None)
            }
        };
        let rank = numerical_rank(source.correlation(), cfg.rank_epsilon)?;
        rows.push(DofRow {
            experiment: DOF.to_string(),
            scenario: tag.clone(),
            w: g.length_wavelengths,
            l: g.num_ports,
            epsilon: cfg.rank_epsilon,
            numerical_rank: rank,
            rank_doubled_ports: rank_doubled,
            fitted_diversity: fit.map(|f| f.0),
            fit_lo: fit.map(|f| f.1 .0),
            fit_hi: fit.map(|f| f.1 .1),
            samples: cfg.trials,
            seed,
        });
        eigenvalues.extend(source.correlation().eigenvalues().iter().enumerate().map(|(i, &e)| EigenRow {
            scenario: tag.clone(),
            index: i,
            eigenvalue: e,
        }));
        reports.extend(report);
    }
    Ok(DofOutput { rows, eigenvalues, reports })
}
