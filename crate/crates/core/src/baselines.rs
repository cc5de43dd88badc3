//! SISO and 2x2 MIMO reference links under the same AI bottleneck.
//!
//! The MIMO link beamforms the single bottlenecked stream on the dominant
//! singular mode of `H`, so it enters the scalar rate/distortion formulas
//! with gain `sigma_max(H)^2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::GainSource;
use crate::error::{Error, Result};
use crate::montecarlo::{complex_normal, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Siso,
    #[serde(rename = "mimo_2x2")]
    Mimo2x2,
}

impl BaselineKind {
    pub fn antennas(self) -> (usize, usize) {
        match self {
            BaselineKind::Siso => (1, 1),
            BaselineKind::Mimo2x2 => (2, 2),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            BaselineKind::Siso => "siso",
            BaselineKind::Mimo2x2 => "mimo_2x2",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "siso" => Ok(BaselineKind::Siso),
            "mimo_2x2" | "mimo" | "mimo2x2" => Ok(BaselineKind::Mimo2x2),
            other => Err(Error::domain(format!("unknown baseline `{other}`"))),
        }
    }
}

pub type Matrix2 = [[Complex64; 2]; 2];

/// Unit-mean exponential gain `|h|^2`, `h ~ CN(0, 1)`.
pub fn siso_gain(rng: &mut TrialRng) -> f64 {
    complex_normal(rng).norm_sqr()
}

/// Largest eigenvalue of `H^H H`.
pub fn dominant_gain(h: &Matrix2) -> f64 {
    // Gram entries
    let a = h[0][0].norm_sqr() + h[1][0].norm_sqr();
    let d = h[0][1].norm_sqr() + h[1][1].norm_sqr();
    let b = h[0][0].conj() * h[0][1] + h[1][0].conj() * h[1][1];
    let half_gap = ((a - d) * 0.5).hypot(b.norm());
    (a + d) * 0.5 + half_gap
}

fn draw_matrix(rng: &mut TrialRng) -> Matrix2 {
    [
        [complex_normal(rng), complex_normal(rng)],
        [complex_normal(rng), complex_normal(rng)],
    ]
}

/// `(gamma_c, gamma_s)` from independent 2x2 i.i.d. CN(0, 1) matrices.
pub fn mimo_gain(rng: &mut TrialRng) -> (f64, f64) {
    let hc = draw_matrix(rng);
    let hs = draw_matrix(rng);
    (dominant_gain(&hc), dominant_gain(&hs))
}

/// Baseline link as a [`GainSource`]. Selection weights do not apply; every
/// weight receives the same gains.
///
/// `rho_cs` couples sensing to communication exactly as for the fluid
/// antenna, `H_s = rho H_c + sqrt(1 - rho^2) H'`; at the default zero this is
/// the independent-`H_s` model.
#[derive(Debug, Clone, Copy)]
pub struct BaselineSource {
    pub kind: BaselineKind,
    pub rho_cs: f64,
}

impl BaselineSource {
    pub fn new(kind: BaselineKind, rho_cs: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho_cs) {
            return Err(Error::domain(format!("rho_cs must lie in [0, 1], got {rho_cs}")));
        }
        Ok(BaselineSource { kind, rho_cs })
    }

    fn couple(&self, c: Complex64, fresh: Complex64) -> Complex64 {
        if self.rho_cs == 1.0 {
            c
        } else {
            c * self.rho_cs + fresh * (1.0 - self.rho_cs * self.rho_cs).sqrt()
        }
    }
}

impl GainSource for BaselineSource {
    type Scratch = ();

    fn scratch(&self) {}

    fn sample(&self, rng: &mut TrialRng, _alphas: &[f64], _: &mut (), out: &mut [(f64, f64)]) {
        let gains = match self.kind {
            BaselineKind::Siso => {
                let hc = complex_normal(rng);
                let hs = self.couple(hc, complex_normal(rng));
                (hc.norm_sqr(), hs.norm_sqr())
            }
            BaselineKind::Mimo2x2 => {
                let hc = draw_matrix(rng);
                let fresh = draw_matrix(rng);
                let hs = [
                    [self.couple(hc[0][0], fresh[0][0]), self.couple(hc[0][1], fresh[0][1])],
                    [self.couple(hc[1][0], fresh[1][0]), self.couple(hc[1][1], fresh[1][1])],
                ];
                (dominant_gain(&hc), dominant_gain(&hs))
            }
        };
        out.iter_mut().for_each(|o| *o = gains);
    }

    fn tag(&self) -> String {
        self.kind.tag().to_string()
    }

    fn ports(&self) -> usize {
        self.kind.antennas().1
    }
}
