//! Experiment description files.
//!
//! A config is a TOML document. Every field has a default taken from the
//! reference simulation set-up, so an empty file is valid:
//!
//! ```toml
//! budgets = [2, 4, 6, "inf"]
//! baselines = ["siso", "mimo_2x2"]
//! alpha_grid = [1.0]
//! rho_cs = 0.0
//! trials = 1000000
//! master_seed = 20240601
//! rank_epsilon = 1e-6
//! independent_ports = [1, 2, 8]
//!
//! [system]
//! p_dbm = 30.0          # or `p = 1000.0` in linear units, not both
//! n0 = 0.1
//! sigma_theta_sq = 1.0
//!
//! [[geometries]]
//! num_ports = 256
//! length_wavelengths = 8.0
//! ```
//!
//! Command-line overrides (seed, trials, output path) are applied on top of
//! the parsed file by the caller; precedence is CLI > file > defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineKind;
use crate::bottleneck::{dbm_to_linear, CAi, SystemParams};
use crate::channel::FasGeometry;
use crate::dof::DEFAULT_RANK_EPSILON;
use crate::error::{Error, Result};

/// Smallest trial count accepted for CSV emission.
pub const MIN_EMIT_TRIALS: u64 = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default = "default_n0")]
    pub n0: f64,
    #[serde(default = "default_sigma")]
    pub sigma_theta_sq: f64,
}

fn default_n0() -> f64 {
    0.1
}

fn default_sigma() -> f64 {
    1.0
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            p_dbm: Some(30.0),
            p: None,
            n0: default_n0(),
            sigma_theta_sq: default_sigma(),
        }
    }
}

impl SystemSection {
    pub fn params(&self) -> Result<SystemParams> {
        let p = match (self.p_dbm, self.p) {
            (Some(_), Some(_)) => {
                return Err(Error::config("system.p", "give either `p_dbm` or `p`, not both"))
            }
            (Some(dbm), None) => dbm_to_linear(dbm),
            (None, Some(p)) => p,
            (None, None) => dbm_to_linear(30.0),
        };
        let check = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("system.{field}"), format!("must be positive and finite, got {v}")))
            }
        };
        check("p", p)?;
        check("n0", self.n0)?;
        check("sigma_theta_sq", self.sigma_theta_sq)?;
        SystemParams::new(p, self.n0, self.sigma_theta_sq)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub system: SystemSection,
    pub budgets: Vec<CAi>,
    pub geometries: Vec<FasGeometry>,
    /// Port counts simulated with `R = I` (validation scenarios).
    pub independent_ports: Vec<usize>,
    pub baselines: Vec<BaselineKind>,
    pub alpha_grid: Vec<f64>,
    pub rho_cs: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub rank_epsilon: f64,
    /// Threshold count of the outage grid used for diversity fits.
    pub outage_grid_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            system: SystemSection::default(),
            budgets: vec![
                CAi::Finite(2.0),
                CAi::Finite(4.0),
                CAi::Finite(6.0),
                CAi::Infinite,
            ],
            geometries: [0.5, 2.0, 8.0]
                .iter()
                .map(|&w| FasGeometry {
                    num_ports: 256,
                    length_wavelengths: w,
                    wavelength: 1.0,
                })
                .collect(),
            independent_ports: vec![1, 2, 8],
            baselines: vec![BaselineKind::Siso, BaselineKind::Mimo2x2],
            alpha_grid: vec![1.0],
            rho_cs: 0.0,
            trials: 1_000_000,
            master_seed: 20_240_601,
            rank_epsilon: DEFAULT_RANK_EPSILON,
            outage_grid_points: 16,
            output_path: None,
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn params(&self) -> Result<SystemParams> {
        self.system.params()
    }

    /// Checks every field; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.budgets.is_empty() {
            return Err(Error::config("budgets", "at least one C_AI value is required"));
        }
        if self.geometries.is_empty() && self.baselines.is_empty() && self.independent_ports.is_empty() {
            return Err(Error::config(
                "geometries",
                "no scenario: give geometries, baselines or independent_ports",
            ));
        }
        for (i, g) in self.geometries.iter().enumerate() {
            g.validate()
                .map_err(|e| Error::config(format!("geometries[{i}]"), e.to_string()))?;
        }
        if let Some(i) = self.independent_ports.iter().position(|&l| l == 0) {
            return Err(Error::config(format!("independent_ports[{i}]"), "port count must be >= 1"));
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::config("alpha_grid", "at least one selection weight is required"));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::config("alpha_grid", format!("weights must lie in [0, 1], got {a}")));
        }
        if !(0.0..=1.0).contains(&self.rho_cs) {
            return Err(Error::config("rho_cs", format!("must lie in [0, 1], got {}", self.rho_cs)));
        }
        if self.trials < MIN_EMIT_TRIALS {
            return Err(Error::config(
                "trials",
                format!("must be at least {MIN_EMIT_TRIALS}, got {}", self.trials),
            ));
        }
        if !(self.rank_epsilon > 0.0 && self.rank_epsilon < 1.0) {
            return Err(Error::config(
                "rank_epsilon",
                format!("must lie in (0, 1), got {}", self.rank_epsilon),
            ));
        }
        if self.outage_grid_points < 4 {
            return Err(Error::config("outage_grid_points", "need at least 4 thresholds"));
        }
        Ok(())
    }
}
