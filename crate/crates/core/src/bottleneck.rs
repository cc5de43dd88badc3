//! AI representation bottleneck.
//!
//! A pre-channel encoder limited to `I(X;Z) <= C_AI` bits behaves, in the
//! Gaussian test-channel model `Z = X + W_z`, like additive noise of variance
//! `N_z* = P / (2^C_AI - 1)`. Every effective SNR downstream of the encoder is
//! therefore capped at `Gamma_AI = P / N_z* = 2^C_AI - 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// AI representation capacity in bits per channel use.
///
/// The unbounded case is its own variant so that sweeps over
/// `{2, 4, 6, inf}` stay totally ordered and exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CAi {
    Finite(f64),
    Infinite,
}

impl CAi {
    pub fn bits(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::domain(format!("C_AI must be >= 0, got {value}")));
        }
        if value.is_infinite() {
            return Ok(CAi::Infinite);
        }
        Ok(CAi::Finite(value))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, CAi::Finite(_))
    }

    /// Bits as a float, `f64::INFINITY` for the unbounded budget.
    pub fn as_f64(self) -> f64 {
        match self {
            CAi::Finite(c) => c,
            CAi::Infinite => f64::INFINITY,
        }
    }

    fn check(self) -> Result<Self> {
        match self {
            CAi::Finite(c) if c.is_nan() || c < 0.0 => {
                Err(Error::domain(format!("C_AI must be >= 0, got {c}")))
            }
            CAi::Finite(c) if c.is_infinite() => Ok(CAi::Infinite),
            other => Ok(other),
        }
    }
}

impl PartialOrd for CAi {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.as_f64().partial_cmp(&other.as_f64())
    }
}

impl fmt::Display for CAi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CAi::Finite(c) => write!(f, "{c}"),
            CAi::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for CAi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(CAi::Infinite),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::domain(format!("cannot parse C_AI from `{s}`")))?;
                CAi::bits(v)
            }
        }
    }
}

impl Serialize for CAi {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            CAi::Finite(c) if c.fract() == 0.0 && c < 9.0e15 => s.serialize_u64(c as u64),
            CAi::Finite(c) => s.serialize_f64(c),
            CAi::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CAi {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Int(i) => CAi::bits(i as f64),
            Raw::Num(v) => CAi::bits(v),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Transmit power, thermal noise and sensing prior. All powers are linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub p: f64,
    pub n0: f64,
    pub sigma_theta_sq: f64,
}

impl SystemParams {
    pub fn new(p: f64, n0: f64, sigma_theta_sq: f64) -> Result<Self> {
        let params = SystemParams {
            p,
            n0,
            sigma_theta_sq,
        };
        params.validate()?;
        Ok(params)
    }

    /// P = 30 dBm (1000 in linear mW units), N0 = 0.1, unit sensing prior.
    pub fn table_defaults() -> Self {
        SystemParams {
            p: dbm_to_linear(30.0),
            n0: 0.1,
            sigma_theta_sq: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p", self.p),
            ("n0", self.n0),
            ("sigma_theta_sq", self.sigma_theta_sq),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn snr(&self) -> f64 {
        self.p / self.n0
    }
}

/// dBm to linear milliwatts.
pub fn dbm_to_linear(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// A budget resolved against a transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiBudget {
    pub c_ai: CAi,
    pub n_z_star: f64,
    pub gamma_ai: f64,
}

impl AiBudget {
    pub fn new(c_ai: CAi, p: f64) -> Result<Self> {
        Ok(AiBudget {
            c_ai: c_ai.check()?,
            n_z_star: representation_noise_variance(c_ai, p)?,
            gamma_ai: ai_snr_ceiling(c_ai)?,
        })
    }

    /// Effective SNR at channel gain `gain` (unchecked hot-path variant of
    /// [`effective_snr`]).
    #[inline]
    pub fn snr_at(&self, gain: f64, params: &SystemParams) -> f64 {
        snr_with_noise(gain, params, self.n_z_star)
    }
}

#[inline]
fn snr_with_noise(gain: f64, params: &SystemParams, n_z: f64) -> f64 {
    if gain <= 0.0 {
        return 0.0;
    }
    if n_z.is_infinite() {
        return 0.0;
    }
    gain * params.p / (params.n0 + gain * n_z)
}

/// Minimum representation noise variance `P / (2^c_ai - 1)`.
///
/// Zero for an unbounded budget and `+inf` for a zero budget.
pub fn representation_noise_variance(c_ai: CAi, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::domain(format!("transmit power must be positive, got {p}")));
    }
    match c_ai.check()? {
        CAi::Infinite => Ok(0.0),
        CAi::Finite(c) if c == 0.0 => Ok(f64::INFINITY),
        CAi::Finite(c) => Ok(p / c.exp2().sub_one_exact(c)),
    }
}

/// SNR ceiling `2^c_ai - 1`.
pub fn ai_snr_ceiling(c_ai: CAi) -> Result<f64> {
    match c_ai.check()? {
        CAi::Infinite => Ok(f64::INFINITY),
        CAi::Finite(c) => Ok(c.exp2().sub_one_exact(c)),
    }
}

/// `gain * P / (N0 + gain * n_z)`.
pub fn effective_snr(gain: f64, params: &SystemParams, n_z: f64) -> Result<f64> {
    if gain.is_nan() || gain < 0.0 {
        return Err(Error::domain(format!("channel gain must be >= 0, got {gain}")));
    }
    if n_z.is_nan() || n_z < 0.0 {
        return Err(Error::domain(format!("representation noise must be >= 0, got {n_z}")));
    }
    if gain.is_infinite() {
        return Ok(if n_z > 0.0 { params.p / n_z } else { f64::INFINITY });
    }
    Ok(snr_with_noise(gain, params, n_z))
}

/// No realization can carry more than `c_ai` bits.
pub fn ai_rate_ceiling(c_ai: CAi) -> Result<f64> {
    Ok(c_ai.check()?.as_f64())
}

/// `sigma_theta_sq / 2^c_ai`, the sensing MSE floor.
pub fn ai_distortion_floor(sigma_theta_sq: f64, c_ai: CAi) -> Result<f64> {
    if !(sigma_theta_sq > 0.0) {
        return Err(Error::domain(format!(
            "sensing prior variance must be positive, got {sigma_theta_sq}"
        )));
    }
    match c_ai.check()? {
        CAi::Infinite => Ok(0.0),
        CAi::Finite(c) => Ok(sigma_theta_sq * (-c).exp2()),
    }
}

trait SubOneExact {
    fn sub_one_exact(self, exponent: f64) -> f64;
}

impl SubOneExact for f64 {
    // 2^c - 1 without cancellation for small c.
    #[inline]
    fn sub_one_exact(self, exponent: f64) -> f64 {
        if exponent < 1.0 {
            (exponent * std::f64::consts::LN_2).exp_m1()
        } else {
            self - 1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, n0: f64) -> SystemParams {
        SystemParams::new(p, n0, 1.0).unwrap()
    }

    #[test]
    fn noise_variance_examples() {
        assert_eq!(representation_noise_variance(CAi::Finite(2.0), 1.0).unwrap(), 1.0 / 3.0);
        assert_eq!(representation_noise_variance(CAi::Infinite, 1.0).unwrap(), 0.0);
        assert_eq!(representation_noise_variance(CAi::Finite(1.0), 3.0).unwrap(), 3.0);
        assert!(representation_noise_variance(CAi::Finite(0.0), 1.0)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn noise_variance_rejects_bad_inputs() {
        assert!(representation_noise_variance(CAi::Finite(-1.0), 1.0).is_err());
        assert!(representation_noise_variance(CAi::Finite(1.0), 0.0).is_err());
        assert!(representation_noise_variance(CAi::Finite(1.0), -2.0).is_err());
        assert!(CAi::bits(-0.5).is_err());
        assert!(CAi::bits(f64::NAN).is_err());
    }

    #[test]
    fn ceiling_examples() {
        assert_eq!(ai_snr_ceiling(CAi::Finite(2.0)).unwrap(), 3.0);
        assert_eq!(ai_snr_ceiling(CAi::Finite(0.0)).unwrap(), 0.0);
        assert_eq!(ai_snr_ceiling(CAi::Finite(6.0)).unwrap(), 63.0);
        assert!(ai_snr_ceiling(CAi::Finite(-0.1)).is_err());
    }

    #[test]
    fn effective_snr_examples() {
        let p = params(1.0, 0.1);
        assert!((effective_snr(1.0, &p, 0.0).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(effective_snr(0.0, &p, 0.5).unwrap(), 0.0);
        assert_eq!(effective_snr(f64::INFINITY, &p, 0.25).unwrap(), 4.0);
        assert!(effective_snr(-1.0, &p, 0.0).is_err());

        let budget = AiBudget::new(CAi::Finite(2.0), 1.0).unwrap();
        let near = effective_snr(1e12, &p, budget.n_z_star).unwrap();
        assert!(near < budget.gamma_ai && (budget.gamma_ai - near) < 1e-9);
    }

    #[test]
    fn zero_budget_is_degenerate_not_an_error() {
        let b = AiBudget::new(CAi::Finite(0.0), 1000.0).unwrap();
        assert_eq!(b.gamma_ai, 0.0);
        assert_eq!(b.snr_at(5.0, &SystemParams::table_defaults()), 0.0);
        assert_eq!(ai_rate_ceiling(CAi::Finite(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn rate_and_distortion_ceilings() {
        assert_eq!(ai_distortion_floor(1.0, CAi::Finite(2.0)).unwrap(), 0.25);
        assert_eq!(ai_distortion_floor(1.0, CAi::Finite(0.0)).unwrap(), 1.0);
        assert_eq!(ai_rate_ceiling(CAi::Finite(6.0)).unwrap(), 6.0);
        assert_eq!(ai_distortion_floor(1.0, CAi::Infinite).unwrap(), 0.0);
        assert!(ai_distortion_floor(0.0, CAi::Finite(1.0)).is_err());
    }

    #[test]
    fn table_defaults_are_linear() {
        let p = SystemParams::table_defaults();
        assert!((p.p - 1000.0).abs() < 1e-9);
        assert!((p.snr() - 1e4).abs() < 1e-6);
    }

    #[test]
    fn c_ai_parsing_and_order() {
        assert_eq!("inf".parse::<CAi>().unwrap(), CAi::Infinite);
        assert_eq!(" 4 ".parse::<CAi>().unwrap(), CAi::Finite(4.0));
        assert!("-3".parse::<CAi>().is_err());
        assert!(CAi::Finite(6.0) < CAi::Infinite);
        assert_eq!(CAi::Infinite.to_string(), "inf");
    }
}
