//! Communication rate and sensing distortion.
//!
//! Per realization the selected gains give
//! `R = log2(1 + Gamma_c*)` and `D = sigma^2 / (1 + Gamma_s*)` with
//! `Gamma = gamma P / (N0 + gamma N_z*)`. The region boundary is the expectation
//! of both over the selected-gain distribution; here it is estimated by
//! Monte Carlo and, for independent ports, by quadrature against the exact
//! density of the maximum of `L` unit exponentials.

use rand_distr::{Distribution, StandardNormal};

use crate::bottleneck::{AiBudget, CAi, SystemParams};
use crate::channel::{GainSource, PortSelection};
use crate::error::{Error, Result};
use crate::montecarlo::{run_trials, MonteCarloEstimate, Workers};
use crate::quadrature::{integrate_to_infinity, Tolerance};

/// One estimated `(R, D_s)` operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub rate: MonteCarloEstimate,
    pub distortion: MonteCarloEstimate,
    pub c_ai: CAi,
    pub scenario: String,
    pub alpha: f64,
}

#[inline]
fn rate_at(gain: f64, params: &SystemParams, budget: &AiBudget) -> f64 {
    budget.snr_at(gain, params).ln_1p() * std::f64::consts::LOG2_E
}

#[inline]
fn distortion_at(gain: f64, params: &SystemParams, budget: &AiBudget) -> f64 {
    params.sigma_theta_sq / (1.0 + budget.snr_at(gain, params))
}

/// `log2(1 + Gamma_c*)` in bits.
pub fn rate_of_draw(selection: &PortSelection, params: &SystemParams, budget: &AiBudget) -> f64 {
    rate_at(selection.gamma_c_star, params, budget)
}

/// `sigma_theta^2 / (1 + Gamma_s*)`.
pub fn distortion_of_draw(selection: &PortSelection, params: &SystemParams, budget: &AiBudget) -> f64 {
    distortion_at(selection.gamma_s_star, params, budget)
}

/// Monte Carlo settings shared by every cell of an estimation grid.
#[derive(Debug, Clone, Copy)]
pub struct Estimation {
    pub params: SystemParams,
    pub trials: u64,
    pub seed: u64,
    pub workers: Workers,
}

/// Estimates every `(alpha, c_ai)` cell from a single stream of channel
/// realizations. Points are ordered alpha-major, then by budget.
pub fn estimate_grid<G: GainSource>(
    source: &G,
    est: &Estimation,
    budgets: &[CAi],
    alphas: &[f64],
) -> Result<Vec<RegionPoint>> {
    est.params.validate()?;
    if est.trials == 0 {
        return Err(Error::domain("trial budget must be at least 1"));
    }
    if budgets.is_empty() || alphas.is_empty() {
        return Err(Error::domain("need at least one budget and one selection weight"));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::domain(format!("alpha must lie in [0, 1], got {a}")));
    }
    let resolved: Vec<AiBudget> = budgets
        .iter()
        .map(|&c| AiBudget::new(c, est.params.p))
        .collect::<Result<_>>()?;

    let nb = resolved.len();
    let cells = alphas.len() * nb * 2;
    let params = est.params;
    let accs = run_trials(
        est.trials,
        est.seed,
        cells,
        est.workers,
        || (source.scratch(), vec![(0.0, 0.0); alphas.len()]),
        |rng, (scratch, gains), out| {
            source.sample(rng, alphas, scratch, gains);
            for (ai, &(gc, gs)) in gains.iter().enumerate() {
                for (bi, b) in resolved.iter().enumerate() {
                    let cell = 2 * (ai * nb + bi);
                    out[cell] = rate_at(gc, &params, b);
                    out[cell + 1] = distortion_at(gs, &params, b);
                }
            }
        },
    )?;

    let tag = source.tag();
    let mut points = Vec::with_capacity(alphas.len() * nb);
    for (ai, &alpha) in alphas.iter().enumerate() {
        for (bi, &c_ai) in budgets.iter().enumerate() {
            let cell = 2 * (ai * nb + bi);
            points.push(RegionPoint {
                rate: accs[cell].estimate(),
                distortion: accs[cell + 1].estimate(),
                c_ai,
                scenario: tag.clone(),
                alpha,
            });
        }
    }
    Ok(points)
}

/// Single-cell convenience wrapper over [`estimate_grid`].
pub fn estimate_region_point<G: GainSource>(
    source: &G,
    est: &Estimation,
    c_ai: CAi,
    alpha: f64,
) -> Result<RegionPoint> {
    Ok(estimate_grid(source, est, &[c_ai], &[alpha])?.remove(0))
}

/// `(rate, distortion)` for `L` independent unit-exponential ports under
/// communication-based selection with independent sensing (`alpha = 1`,
/// `rho_cs = 0`), by adaptive quadrature.
///
/// The selected communication gain has density
/// `L (1 - e^-x)^(L-1) e^-x`; the sensing gain at the chosen port stays a
/// unit exponential.
pub fn independent_ports_quadrature(
    num_ports: usize,
    params: &SystemParams,
    budget: &AiBudget,
) -> Result<(f64, f64)> {
    if num_ports == 0 {
        return Err(Error::domain("need at least one port"));
    }
    params.validate()?;
    let l = num_ports as f64;
    let max_density = |x: f64| {
        let below = -(-x).exp_m1();
        l * below.powi(num_ports as i32 - 1) * (-x).exp()
    };
    let tol = Tolerance { abs: 1e-13, rel: 1e-11 };
    let rate = integrate_to_infinity(|x| rate_at(x, params, budget) * max_density(x), 0.0, tol)?;
    let dist = integrate_to_infinity(|x| distortion_at(x, params, budget) * (-x).exp(), 0.0, tol)?;
    log::debug!(
        "quadrature L={num_ports}: rate err {:.1e} ({} segs), distortion err {:.1e} ({} segs)",
        rate.abs_error,
        rate.segments,
        dist.abs_error,
        dist.segments
    );
    Ok((rate.value, dist.value))
}

/// Empirical squared error of the linear MMSE estimate of
/// `theta ~ N(0, sigma^2)` from `y = sqrt(gamma) theta + n`.
///
/// The observation noise has variance `sigma^2`, so `gamma` is the SNR
/// relative to the prior power and the attainable MSE is
/// `sigma^2 / (1 + gamma)`. `gamma = inf` observes `theta` directly.
pub fn mmse_oracle(
    gamma: f64,
    sigma_theta_sq: f64,
    trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<MonteCarloEstimate> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain(format!("SNR must be >= 0, got {gamma}")));
    }
    if !(sigma_theta_sq > 0.0) {
        return Err(Error::domain("prior variance must be positive"));
    }
    let sigma = sigma_theta_sq.sqrt();
    let accs = run_trials(trials, seed, 1, workers, || (), |rng, _, out| {
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        let theta = sigma * z1;
        let estimate = if gamma.is_infinite() {
            theta
        } else {
            let y = gamma.sqrt() * theta + sigma * z2;
            gamma.sqrt() / (1.0 + gamma) * y
        };
        out[0] = (theta - estimate).powi(2);
    })?;
    Ok(accs[0].estimate())
}

/// Vertices of the time-sharing closure of a point cloud: the lower convex
/// hull in `(rate, distortion)`, restricted to its Pareto part, sorted by
/// rate.
pub fn time_sharing_frontier(points: &[RegionPoint]) -> Vec<RegionPoint> {
    let mut pts: Vec<&RegionPoint> = points.iter().collect();
    pts.sort_by(|a, b| {
        a.rate
            .mean
            .total_cmp(&b.rate.mean)
            .then(a.distortion.mean.total_cmp(&b.distortion.mean))
    });
    let mut hull: Vec<&RegionPoint> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.rate.mean - o.rate.mean) * (p.distortion.mean - o.distortion.mean)
                - (a.distortion.mean - o.distortion.mean) * (p.rate.mean - o.rate.mean);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Keep the segment from the minimum-distortion vertex to the
    // maximum-rate end.
    let start = hull
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.distortion.mean.total_cmp(&b.1.distortion.mean))
        .map(|(i, _)| i)
        .unwrap_or(0);
    hull[start..].iter().map(|p| (*p).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FasSource;

    fn sel(gc: f64, gs: f64) -> PortSelection {
        PortSelection {
            index: 0,
            gamma_c_star: gc,
            gamma_s_star: gs,
        }
    }

    fn unit() -> SystemParams {
        SystemParams::new(1.0, 0.1, 1.0).unwrap()
    }

    #[test]
    fn per_draw_rate_examples() {
        let free = AiBudget::new(CAi::Infinite, 1.0).unwrap();
        assert!((rate_of_draw(&sel(1.0, 0.0), &unit(), &free) - 11f64.log2()).abs() < 1e-12);
        assert!((rate_of_draw(&sel(1.0, 0.0), &unit(), &free) - 3.4594).abs() < 1e-4);
        assert_eq!(rate_of_draw(&sel(0.0, 0.0), &unit(), &free), 0.0);
        let two = AiBudget::new(CAi::Finite(2.0), 1.0).unwrap();
        let r = rate_of_draw(&sel(1e12, 0.0), &unit(), &two);
        assert!(r < 2.0 && 2.0 - r < 1e-9);
    }

    #[test]
    fn per_draw_distortion_examples() {
        // gamma_s = 3 with no bottleneck and N0 = P gives Gamma = 3.
        let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        let free = AiBudget::new(CAi::Infinite, 1.0).unwrap();
        assert!((distortion_of_draw(&sel(0.0, 3.0), &p, &free) - 0.25).abs() < 1e-15);
        assert_eq!(distortion_of_draw(&sel(0.0, 0.0), &p, &free), 1.0);
        let two = AiBudget::new(CAi::Finite(2.0), 1.0).unwrap();
        let d = distortion_of_draw(&sel(0.0, 1e12), &unit(), &two);
        assert!(d > 0.25 && d - 0.25 < 1e-9);
    }

    #[test]
    fn quadrature_zero_budget_and_dominance() {
        let p = SystemParams::table_defaults();
        let zero = AiBudget::new(CAi::Finite(0.0), p.p).unwrap();
        let (r, d) = independent_ports_quadrature(1, &p, &zero).unwrap();
        assert_eq!(r, 0.0);
        assert!((d - 1.0).abs() < 1e-10);

        let b = AiBudget::new(CAi::Finite(4.0), p.p).unwrap();
        let (r8, _) = independent_ports_quadrature(8, &p, &b).unwrap();
        let (r16, _) = independent_ports_quadrature(16, &p, &b).unwrap();
        assert!(r16 > r8);
        assert!(independent_ports_quadrature(0, &p, &b).is_err());
    }

    #[test]
    fn grid_rejects_bad_requests() {
        let src = FasSource::independent(2, 0.0).unwrap();
        let mut est = Estimation {
            params: SystemParams::table_defaults(),
            trials: 0,
            seed: 1,
            workers: Workers::new(1),
        };
        assert!(estimate_region_point(&src, &est, CAi::Finite(2.0), 1.0).is_err());
        est.trials = 10;
        assert!(estimate_region_point(&src, &est, CAi::Finite(2.0), 1.5).is_err());
        assert!(estimate_grid(&src, &est, &[], &[1.0]).is_err());
    }

    #[test]
    fn mmse_oracle_limits() {
        let w = Workers::new(1);
        let prior = mmse_oracle(0.0, 2.0, 50_000, 3, w).unwrap();
        assert!((prior.mean - 2.0).abs() < 4.0 * prior.std_error);
        assert_eq!(mmse_oracle(f64::INFINITY, 1.0, 1000, 3, w).unwrap().mean, 0.0);
        let tiny = mmse_oracle(1e9, 1.0, 1000, 3, w).unwrap();
        assert!(tiny.mean < 1e-8);
        assert!(mmse_oracle(-1.0, 1.0, 10, 3, w).is_err());
    }

    fn pt(rate: f64, dist: f64) -> RegionPoint {
        let e = |m| MonteCarloEstimate { mean: m, std_error: 0.0, trials: 1 };
        RegionPoint {
            rate: e(rate),
            distortion: e(dist),
            c_ai: CAi::Infinite,
            scenario: "t".into(),
            alpha: 0.0,
        }
    }

    #[test]
    fn time_sharing_drops_dominated_and_concave_points() {
        let pts = vec![pt(1.0, 0.1), pt(2.0, 0.5), pt(3.0, 0.6), pt(1.5, 0.4), pt(0.5, 0.3)];
        let hull = time_sharing_frontier(&pts);
        let rates: Vec<f64> = hull.iter().map(|p| p.rate.mean).collect();
        // (1.5, 0.4) and (2, 0.5) lie above the chord from (1, 0.1) to (3, 0.6);
        // (0.5, 0.3) is dominated by (1, 0.1).
        assert_eq!(rates, vec![1.0, 3.0]);
    }
}
