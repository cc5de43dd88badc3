//! Library routes checked against independent test-side oracles.

use fasisac::baselines::{mimo_gain, BaselineSource};
use fasisac::channel::{draw_channels, FasSource};
use fasisac::dof::{outage_curve, selected_gain_samples};
use fasisac::metrics::{estimate_grid, independent_ports_quadrature, mmse_oracle, Estimation};
use fasisac::montecarlo::{run_trials, trial_rng};
use fasisac::{AiBudget, BaselineKind, CAi, FasGeometry, SpatialCorrelation, SystemParams, Workers};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn table() -> SystemParams {
    SystemParams::new(1000.0, 0.1, 1.0).unwrap()
}

fn workers() -> Workers {
    Workers::new(2)
}

/// `E1(z)` by its convergent series, adequate for `z < 1`.
fn exp_integral_e1(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..60 {
        term *= -z / k as f64;
        sum += term / k as f64;
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Composite Simpson over `u = ln x`, which resolves both the `1/SNR`
/// knee near zero and the exponential tail.
fn log_simpson(f: impl Fn(f64) -> f64) -> f64 {
    let (a, b, n) = (-40.0f64, 4.5f64, 200_000usize);
    let h = (b - a) / n as f64;
    let g = |u: f64| {
        let x = u.exp();
        f(x) * x
    };
    let mut s = g(a) + g(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Test-side `(rate, distortion)` for `L` i.i.d. unit-exponential ports.
fn order_statistic_oracle(l: usize, c_ai: Option<f64>) -> (f64, f64) {
    let (p, n0) = (1000.0, 0.1);
    let nz = c_ai.map_or(0.0, |c| p / (2f64.powf(c) - 1.0));
    let snr = |x: f64| x * p / (n0 + x * nz);
    let density = |x: f64| l as f64 * (1.0 - (-x).exp()).powi(l as i32 - 1) * (-x).exp();
    let rate = log_simpson(|x| (1.0 + snr(x)).log2() * density(x));
    let dist = log_simpson(|x| (-x).exp() / (1.0 + snr(x)));
    (rate, dist)
}

/// `J0(x) = (1/pi) int_0^pi cos(x sin t) dt` by the trapezoid rule, which is
/// spectrally accurate for this periodic integrand.
fn j0_trapezoid(x: f64) -> f64 {
    let n = 400;
    let h = std::f64::consts::PI / n as f64;
    let mut s = 0.5 * (1.0 + (x * 0.0f64.sin()).cos());
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s / n as f64
}

// Reference values evaluated once at 40 digits with an arbitrary-precision
// package; columns are L, C_AI (None = unbounded), rate, distortion.
const ORDER_STATISTIC_TABLE: [(usize, Option<f64>, f64, f64); 6] = [
    (1, Some(2.0), 1.997_379_098_474_393_2, 0.250_501_837_236_400_61),
    (1, None, 12.456_356_041_494_459, 0.000_863_408_807_021_272_53),
    (2, Some(2.0), 1.999_550_920_070_634, 0.250_501_837_236_400_61),
    (2, None, 13.455_166_076_068_727, 0.000_863_408_807_021_272_53),
    (8, Some(2.0), 1.999_854_157_238_521_3, 0.250_501_837_236_400_61),
    (8, None, 14.589_268_315_899_992, 0.000_863_408_807_021_272_53),
];

#[test]
fn exponential_integral_oracle_reproduces_frozen_rate() {
    let s: f64 = 1e4;
    let oracle = (1.0 / s).exp() * exp_integral_e1(1.0 / s) / std::f64::consts::LN_2;
    assert!((oracle - 12.456_356_041_494_459).abs() < 1e-12, "{oracle}");
}

#[test]
fn test_side_quadrature_reproduces_frozen_table() {
    for (l, c, rate, dist) in ORDER_STATISTIC_TABLE {
        let (r, d) = order_statistic_oracle(l, c);
        assert!((r - rate).abs() < 1e-9 * rate, "L={l} c={c:?}: {r} vs {rate}");
        assert!((d - dist).abs() < 1e-9 * dist, "L={l} c={c:?}: {d} vs {dist}");
    }
}

#[test]
fn library_quadrature_matches_order_statistic_table() {
    for (l, c, rate, dist) in ORDER_STATISTIC_TABLE {
        let budget = AiBudget::new(c.map_or(CAi::Infinite, CAi::Finite), 1000.0).unwrap();
        let (r, d) = independent_ports_quadrature(l, &table(), &budget).unwrap();
        assert!((r - rate).abs() < 1e-8 * rate, "L={l} c={c:?}: {r} vs {rate}");
        assert!((d - dist).abs() < 1e-8 * dist, "L={l} c={c:?}: {d} vs {dist}");
    }
}

#[test]
fn single_port_quadrature_matches_closed_form_to_six_digits() {
    let budget = AiBudget::new(CAi::Infinite, 1000.0).unwrap();
    let (r, _) = independent_ports_quadrature(1, &table(), &budget).unwrap();
    assert!((r - 12.456_356).abs() < 5e-7);
}

#[test]
fn eight_port_monte_carlo_matches_quadrature() {
    let source = FasSource::independent(8, 0.0).unwrap();
    let est = Estimation { params: table(), trials: 200_000, seed: 81, workers: workers() };
    let budgets = [CAi::Finite(2.0), CAi::Finite(4.0), CAi::Finite(6.0)];
    for p in estimate_grid(&source, &est, &budgets, &[1.0]).unwrap() {
        let (r, d) =
            independent_ports_quadrature(8, &table(), &AiBudget::new(p.c_ai, 1000.0).unwrap()).unwrap();
        assert!((p.rate.mean - r).abs() < 3.0 * p.rate.std_error, "c={} {} vs {r}", p.c_ai, p.rate);
        assert!((p.distortion.mean - d).abs() < 3.0 * p.distortion.std_error, "c={}", p.c_ai);
    }
}

#[test]
fn selected_gain_cdf_is_fourth_power_order_statistic() {
    let source = FasSource::independent(4, 0.0).unwrap();
    let samples = selected_gain_samples(&source, 400_000, 4, workers()).unwrap();
    let xs: Vec<f64> = (1..=20).map(|i| 0.15 * i as f64).collect();
    for pt in outage_curve(&samples, &xs).unwrap() {
        let want = (1.0 - (-pt.threshold).exp()).powi(4);
        let binomial = (want * (1.0 - want) / samples.len() as f64).sqrt();
        assert!((pt.cdf - want).abs() < 3.0 * binomial, "x={}: {} vs {want}", pt.threshold, pt.cdf);
    }
}

#[test]
fn wishart_oracle_gives_three_and_a_half() {
    // Ordered eigenvalue density of a 2x2 complex Wishart matrix with unit
    // scale is proportional to (a - b)^2 e^(-a-b) on a > b > 0.
    let (n, top) = (1200usize, 40.0);
    let h = top / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let a = (i as f64 + 0.5) * h;
        for j in 0..i {
            let b = (j as f64 + 0.5) * h;
            let w = (a - b).powi(2) * (-a - b).exp();
            num += a * w;
            den += w;
        }
    }
    assert!((num / den - 3.5).abs() < 2e-3, "{}", num / den);
}

#[test]
fn mimo_dominant_gain_has_mean_three_and_a_half() {
    let accs = run_trials(1_000_000, 22, 2, workers(), || (), |rng, _, out| {
        let (c, s) = mimo_gain(rng);
        out[0] = c;
        out[1] = s;
    })
    .unwrap();
    for a in accs {
        let e = a.estimate();
        assert!((e.mean - 3.5).abs() < 3.0 * e.std_error, "{e}");
    }
}

#[test]
fn jakes_sample_covariance_matches_bessel_kernel() {
    let g = FasGeometry::new(8, 1.0, 1.0).unwrap();
    let corr = SpatialCorrelation::jakes(&g).unwrap();
    let trials = 1_000_000u64;
    let l = 8;
    let accs = run_trials(trials, 5, l * l, workers(), || (), |rng, _, out| {
        let d = draw_channels(&corr, 0.0, rng).unwrap();
        for i in 0..l {
            for j in 0..l {
                out[i * l + j] = (d.h_c[i] * d.h_c[j].conj()).re;
            }
        }
    })
    .unwrap();
    let spacing = g.spacing();
    for i in 0..l {
        for j in 0..l {
            let want = j0_trapezoid(2.0 * std::f64::consts::PI * spacing * i.abs_diff(j) as f64);
            let got = accs[i * l + j].estimate().mean;
            assert!((got - want).abs() < 5e-3, "({i},{j}): {got} vs {want}");
        }
    }
}

#[test]
fn zero_length_matches_single_port_rate() {
    let est = Estimation { params: table(), trials: 200_000, seed: 0, workers: workers() };
    let collapsed = FasSource::jakes(&FasGeometry::new(16, 0.0, 1.0).unwrap(), 0.0).unwrap();
    let single = BaselineSource::new(BaselineKind::Siso, 0.0).unwrap();
    let budgets = [CAi::Finite(4.0), CAi::Infinite];
    let a = estimate_grid(&collapsed, &est, &budgets, &[1.0]).unwrap();
    let est_b = Estimation { seed: 1, ..est };
    let b = estimate_grid(&single, &est_b, &budgets, &[1.0]).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(x.rate.z_score(&y.rate) < 3.0, "{} vs {}", x.rate, y.rate);
    }
}

#[test]
fn linear_mmse_attains_predicted_distortion() {
    let e = mmse_oracle(3.0, 1.0, 1_000_000, 9, workers()).unwrap();
    assert!((e.mean - 0.25).abs() < 3.0 * e.std_error, "{e}");
    let scaled = mmse_oracle(3.0, 4.0, 200_000, 9, workers()).unwrap();
    assert!((scaled.mean - 1.0).abs() < 3.0 * scaled.std_error, "{scaled}");
}

#[test]
fn trial_streams_do_not_depend_on_worker_count() {
    use rand::Rng;
    let a: f64 = trial_rng(3, 99).random();
    let one = fasisac::montecarlo::collect_samples(5000, 3, Workers::new(1), || (), |r, _| r.random()).unwrap();
    let many = fasisac::montecarlo::collect_samples(5000, 3, Workers::new(5), || (), |r, _| r.random()).unwrap();
    assert_eq!(one, many);
    assert_eq!(one[99], a);
}
