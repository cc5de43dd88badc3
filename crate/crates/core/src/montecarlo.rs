//! Reproducible parallel Monte Carlo.
//!
//! Every trial draws from its own ChaCha8 stream keyed by
//! `(master_seed, trial_index)`, so a trial's randomness never depends on
//! which worker runs it. Trials are grouped into fixed-size blocks, each
//! block is accumulated sequentially in trial order, and block results are
//! merged by a pairwise tree whose shape depends only on the trial count.
//! Results are therefore bit-identical for any worker count.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type TrialRng = ChaCha8Rng;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "FASISAC_WORKERS";

const BLOCK: u64 = 2048;

/// Stream for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Circularly symmetric CN(0, 1) sample.
#[inline]
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Number of worker threads used for trial blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workers(usize);

impl Workers {
    pub fn new(n: usize) -> Self {
        Workers(n.max(1))
    }

    /// `FASISAC_WORKERS` if set and valid, otherwise available parallelism.
    pub fn from_env() -> Self {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => return Workers(n),
                _ => log::warn!("ignoring invalid {WORKERS_ENV}={v:?}"),
            }
        }
        Workers(
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        )
    }

    pub fn get(self) -> usize {
        self.0
    }

    fn install<T: Send>(self, op: impl FnOnce() -> T + Send) -> T {
        match rayon::ThreadPoolBuilder::new().num_threads(self.0).build() {
            Ok(pool) => pool.install(op),
            Err(e) => {
                log::warn!("falling back to the global pool: {e}");
                op()
            }
        }
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::from_env()
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl MonteCarloEstimate {
    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: &MonteCarloEstimate) -> f64 {
        let se = self.std_error.hypot(other.std_error);
        if se == 0.0 {
            if self.mean == other.mean {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - other.mean).abs() / se
        }
    }

    pub fn combined_se(&self, other: &MonteCarloEstimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

impl fmt::Display for MonteCarloEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} ± {:.2e} (n={})", self.mean, self.std_error, self.trials)
    }
}

/// Running mean and centred second moment (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Accumulator) -> Accumulator {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Accumulator {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn estimate(&self) -> MonteCarloEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        MonteCarloEstimate {
            mean: self.mean,
            std_error: (var / self.n.max(1) as f64).sqrt(),
            trials: self.n,
        }
    }
}

fn blocks(trials: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let count = trials.div_ceil(BLOCK) as usize;
    (0..count).into_par_iter().map(move |b| {
        let b = b as u64;
        (b * BLOCK, ((b + 1) * BLOCK).min(trials))
    })
}

fn tree_merge(mut level: Vec<Vec<Accumulator>>) -> Vec<Accumulator> {
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => a.iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    level.pop().unwrap_or_default()
}

/// Runs `trials` trials, each writing one value per cell into its output
/// slice, and returns one accumulator per cell.
///
/// `scratch` builds per-block working memory; `body` receives the trial's
/// own stream.
pub fn run_trials<S, I, F>(
    trials: u64,
    master_seed: u64,
    cells: usize,
    workers: Workers,
    scratch: I,
    body: F,
) -> Result<Vec<Accumulator>>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut TrialRng, &mut S, &mut [f64]) + Sync,
{
    if trials == 0 {
        return Err(Error::domain("trial budget must be at least 1"));
    }
    let partials: Vec<Vec<Accumulator>> = workers.install(|| {
        blocks(trials)
            .map(|(start, end)| {
                let mut s = scratch();
                let mut accs = vec![Accumulator::default(); cells];
                let mut out = vec![0.0; cells];
                for t in start..end {
                    let mut rng = trial_rng(master_seed, t);
                    body(&mut rng, &mut s, &mut out);
                    for (acc, &v) in accs.iter_mut().zip(&out) {
                        acc.push(v);
                    }
                }
                accs
            })
            .collect()
    });
    Ok(tree_merge(partials))
}

/// Collects one scalar per trial, in trial order.
pub fn collect_samples<S, I, F>(
    trials: u64,
    master_seed: u64,
    workers: Workers,
    scratch: I,
    body: F,
) -> Result<Vec<f64>>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut TrialRng, &mut S) -> f64 + Sync,
{
    if trials == 0 {
        return Err(Error::domain("trial budget must be at least 1"));
    }
    let chunks: Vec<Vec<f64>> = workers.install(|| {
        blocks(trials)
            .map(|(start, end)| {
                let mut s = scratch();
                (start..end)
                    .map(|t| body(&mut trial_rng(master_seed, t), &mut s))
                    .collect()
            })
            .collect()
    });
    Ok(chunks.concat())
}
