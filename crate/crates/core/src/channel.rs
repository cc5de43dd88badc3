//! Fluid-antenna channel model.
//!
//! A 1D fluid antenna of length `W` exposes `L` equally spaced ports. Under
//! rich scattering the port gains are jointly CN(0, R) with the Toeplitz
//! Jakes correlation `R[k][l] = J0(2 pi d |k - l| / lambda)`, `d = W/(L-1)`.
//! Sensing and communication vectors share `R` and are coupled through one
//! scalar `rho_cs`, i.e. the augmented covariance is
//! `[[R, rho_cs R], [rho_cs R, R]]`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{complex_normal, TrialRng};
use crate::special::bessel_j0;

/// Port layout of a 1D fluid antenna.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FasGeometry {
    pub num_ports: usize,
    /// Aperture length in wavelengths, `W / lambda`.
    pub length_wavelengths: f64,
    #[serde(default = "unit_wavelength")]
    pub wavelength: f64,
}

fn unit_wavelength() -> f64 {
    1.0
}

impl FasGeometry {
    pub fn new(num_ports: usize, length_wavelengths: f64, wavelength: f64) -> Result<Self> {
        let g = FasGeometry {
            num_ports,
            length_wavelengths,
            wavelength,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_ports == 0 {
            return Err(Error::domain("a fluid antenna needs at least one port"));
        }
        if !(self.length_wavelengths >= 0.0 && self.length_wavelengths.is_finite()) {
            return Err(Error::domain(format!(
                "length must be finite and >= 0, got {}",
                self.length_wavelengths
            )));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::domain(format!(
                "wavelength must be positive, got {}",
                self.wavelength
            )));
        }
        Ok(())
    }

    /// Physical length `W`.
    pub fn length(&self) -> f64 {
        self.length_wavelengths * self.wavelength
    }

    /// Inter-port spacing `W / (L - 1)`; zero for a single port.
    pub fn spacing(&self) -> f64 {
        if self.num_ports < 2 {
            0.0
        } else {
            self.length() / (self.num_ports - 1) as f64
        }
    }

    pub fn tag(&self) -> String {
        format!("fas-W{}-L{}", self.length_wavelengths, self.num_ports)
    }
}

/// Port correlation matrix together with a real factor `F` (`F F^T = R`).
#[derive(Debug, Clone)]
pub struct SpatialCorrelation {
    matrix: DMatrix<f64>,
    /// Row-major `L x r`.
    root: Vec<f64>,
    rank: usize,
    eigenvalues: Vec<f64>,
}

impl SpatialCorrelation {
    /// Jakes correlation for `geometry`.
    pub fn jakes(geometry: &FasGeometry) -> Result<Self> {
        geometry.validate()?;
        let l = geometry.num_ports;
        let step = 2.0 * std::f64::consts::PI * geometry.spacing() / geometry.wavelength;
        let lags: Vec<f64> = (0..l).map(|k| bessel_j0(step * k as f64)).collect();
        let matrix = DMatrix::from_fn(l, l, |i, j| lags[i.abs_diff(j)]);
        Self::from_matrix(matrix)
    }

    /// Independent ports, `R = I`.
    pub fn identity(num_ports: usize) -> Result<Self> {
        if num_ports == 0 {
            return Err(Error::domain("a fluid antenna needs at least one port"));
        }
        Self::from_matrix(DMatrix::identity(num_ports, num_ports))
    }

    /// Factor an arbitrary correlation matrix (symmetric, unit diagonal).
    ///
    /// Eigenvalues that come out negative through rounding are floored at
    /// zero; eigen-directions below `L * eps * lambda_max` are dropped from the
    /// factor since they are indistinguishable from rounding noise.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let l = matrix.nrows();
        if l == 0 || matrix.ncols() != l {
            return Err(Error::domain(format!(
                "correlation matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for i in 0..l {
            if (matrix[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 {
                    return Err(Error::domain(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }

        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();

        let lambda_max = eigenvalues[0];
        let cutoff = l as f64 * f64::EPSILON * lambda_max;
        let rank = eigenvalues.iter().take_while(|&&v| v > cutoff).count().max(1);

        let mut root = vec![0.0; l * rank];
        for (c, &idx) in order.iter().take(rank).enumerate() {
            let scale = eigenvalues[c].sqrt();
            for r in 0..l {
                root[r * rank + c] = eig.eigenvectors[(r, idx)] * scale;
            }
        }

        Ok(SpatialCorrelation {
            matrix,
            root,
            rank,
            eigenvalues,
        })
    }

    pub fn num_ports(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Nonincreasing eigenvalues, negatives floored at zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column count `r` of the factor.
    pub fn root_rank(&self) -> usize {
        self.rank
    }

    pub fn root_row(&self, port: usize) -> &[f64] {
        &self.root[port * self.rank..(port + 1) * self.rank]
    }

    /// `max |F F^T - R|`.
    pub fn reconstruction_error(&self) -> f64 {
        let l = self.num_ports();
        let mut worst: f64 = 0.0;
        for i in 0..l {
            for j in 0..=i {
                let v: f64 = self
                    .root_row(i)
                    .iter()
                    .zip(self.root_row(j))
                    .map(|(a, b)| a * b)
                    .sum();
                worst = worst.max((v - self.matrix[(i, j)]).abs());
            }
        }
        worst
    }
}

/// One realization of the communication and sensing port gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub h_c: Vec<Complex64>,
    pub h_s: Vec<Complex64>,
}

/// The chosen port. `index` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortSelection {
    pub index: usize,
    pub gamma_c_star: f64,
    pub gamma_s_star: f64,
}

impl PortSelection {
    /// One-based port number.
    pub fn port_number(&self) -> usize {
        self.index + 1
    }
}

fn check_rho(rho_cs: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho_cs) {
        return Err(Error::domain(format!("rho_cs must lie in [0, 1], got {rho_cs}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

#[inline]
fn row_times(row: &[f64], w: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (f, z) in row.iter().zip(w) {
        re += f * z.re;
        im += f * z.im;
    }
    Complex64::new(re, im)
}

/// Draws the two innovation vectors in stream order: `w1` then `w2`.
fn draw_innovations(rank: usize, rng: &mut TrialRng, w1: &mut Vec<Complex64>, w2: &mut Vec<Complex64>) {
    w1.clear();
    w2.clear();
    w1.extend((0..rank).map(|_| complex_normal(rng)));
    w2.extend((0..rank).map(|_| complex_normal(rng)));
}

fn mix(rho_cs: f64, w1: &[Complex64], w2: &[Complex64], out: &mut Vec<Complex64>) {
    out.clear();
    if rho_cs == 1.0 {
        out.extend_from_slice(w1);
    } else {
        let tail = (1.0 - rho_cs * rho_cs).sqrt();
        out.extend(w1.iter().zip(w2).map(|(a, b)| a * rho_cs + b * tail));
    }
}

/// `h_c = F w1`, `h_s = F (rho_cs w1 + sqrt(1 - rho_cs^2) w2)`.
pub fn draw_channels(corr: &SpatialCorrelation, rho_cs: f64, rng: &mut TrialRng) -> Result<ChannelDraw> {
    check_rho(rho_cs)?;
    let (mut w1, mut w2, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    draw_innovations(corr.root_rank(), rng, &mut w1, &mut w2);
    mix(rho_cs, &w1, &w2, &mut ws);
    let l = corr.num_ports();
    Ok(ChannelDraw {
        h_c: (0..l).map(|p| row_times(corr.root_row(p), &w1)).collect(),
        h_s: (0..l).map(|p| row_times(corr.root_row(p), &ws)).collect(),
    })
}

#[inline]
fn argmax_utility(alpha: f64, gc: &[f64], gs: &[f64]) -> usize {
    let mut best = 0;
    let mut best_u = f64::NEG_INFINITY;
    for (i, (c, s)) in gc.iter().zip(gs).enumerate() {
        let u = alpha * c + (1.0 - alpha) * s;
        if u > best_u {
            best_u = u;
            best = i;
        }
    }
    best
}

/// `argmax_l alpha |h_c,l|^2 + (1 - alpha) |h_s,l|^2`, lowest index on ties.
pub fn select_port(draw: &ChannelDraw, alpha: f64) -> Result<PortSelection> {
    check_alpha(alpha)?;
    if draw.h_c.is_empty() || draw.h_c.len() != draw.h_s.len() {
        return Err(Error::domain("draw must have matching, non-empty port vectors"));
    }
    let gc: Vec<f64> = draw.h_c.iter().map(|h| h.norm_sqr()).collect();
    let gs: Vec<f64> = draw.h_s.iter().map(|h| h.norm_sqr()).collect();
    let index = argmax_utility(alpha, &gc, &gs);
    Ok(PortSelection {
        index,
        gamma_c_star: gc[index],
        gamma_s_star: gs[index],
    })
}

/// Something that yields selected `(gamma_c*, gamma_s*)` pairs per trial.
///
/// `sample` fills `out[i]` for selection weight `alphas[i]`; all weights see
/// the same underlying channel realization.
pub trait GainSource: Sync {
    type Scratch: Send;

    fn scratch(&self) -> Self::Scratch;

    fn sample(&self, rng: &mut TrialRng, alphas: &[f64], scratch: &mut Self::Scratch, out: &mut [(f64, f64)]);

    fn tag(&self) -> String;

    /// Ports (or receive antennas) reported alongside results.
    fn ports(&self) -> usize;

    /// Aperture in wavelengths, when meaningful.
    fn length_wavelengths(&self) -> Option<f64> {
        None
    }
}

/// Port-selecting fluid antenna as a [`GainSource`].
#[derive(Debug, Clone)]
pub struct FasSource {
    corr: SpatialCorrelation,
    rho_cs: f64,
    tag: String,
    length: Option<f64>,
}

impl FasSource {
    pub fn new(corr: SpatialCorrelation, rho_cs: f64, tag: impl Into<String>) -> Result<Self> {
        check_rho(rho_cs)?;
        Ok(FasSource {
            corr,
            rho_cs,
            tag: tag.into(),
            length: None,
        })
    }

    pub fn jakes(geometry: &FasGeometry, rho_cs: f64) -> Result<Self> {
        let mut s = Self::new(SpatialCorrelation::jakes(geometry)?, rho_cs, geometry.tag())?;
        s.length = Some(geometry.length_wavelengths);
        Ok(s)
    }

    /// Independent ports, `R = I`.
    pub fn independent(num_ports: usize, rho_cs: f64) -> Result<Self> {
        Self::new(
            SpatialCorrelation::identity(num_ports)?,
            rho_cs,
            format!("iid-L{num_ports}"),
        )
    }

    pub fn correlation(&self) -> &SpatialCorrelation {
        &self.corr
    }

    /// `max_l |h_c,l|^2` only; the sensing innovation is not drawn.
    pub fn max_comm_gain(&self, rng: &mut TrialRng, w1: &mut Vec<Complex64>) -> f64 {
        w1.clear();
        w1.extend((0..self.corr.root_rank()).map(|_| complex_normal(rng)));
        (0..self.corr.num_ports())
            .map(|p| row_times(self.corr.root_row(p), w1).norm_sqr())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Default)]
pub struct FasScratch {
    w1: Vec<Complex64>,
    w2: Vec<Complex64>,
    ws: Vec<Complex64>,
    gc: Vec<f64>,
    gs: Vec<f64>,
}

impl GainSource for FasSource {
    type Scratch = FasScratch;

    fn scratch(&self) -> FasScratch {
        FasScratch::default()
    }

    fn sample(&self, rng: &mut TrialRng, alphas: &[f64], s: &mut FasScratch, out: &mut [(f64, f64)]) {
        let corr = &self.corr;
        let l = corr.num_ports();
        draw_innovations(corr.root_rank(), rng, &mut s.w1, &mut s.w2);
        mix(self.rho_cs, &s.w1, &s.w2, &mut s.ws);

        s.gc.clear();
        s.gc.extend((0..l).map(|p| row_times(corr.root_row(p), &s.w1).norm_sqr()));

        if alphas.iter().all(|&a| a == 1.0) {
            // Only the selected port's sensing gain is needed; computing one
            // row gives the same value the full vector would.
            let best = argmax_utility(1.0, &s.gc, &s.gc);
            let gs = row_times(corr.root_row(best), &s.ws).norm_sqr();
            out.iter_mut().for_each(|o| *o = (s.gc[best], gs));
            return;
        }

        s.gs.clear();
        s.gs.extend((0..l).map(|p| row_times(corr.root_row(p), &s.ws).norm_sqr()));
        for (o, &alpha) in out.iter_mut().zip(alphas) {
            let best = argmax_utility(alpha, &s.gc, &s.gs);
            *o = (s.gc[best], s.gs[best]);
        }
    }

    fn tag(&self) -> String {
        self.tag.clone()
    }

    fn ports(&self) -> usize {
        self.corr.num_ports()
    }

    fn length_wavelengths(&self) -> Option<f64> {
        self.length
    }
}
