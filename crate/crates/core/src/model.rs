//! Pointwise definitions of the reduced one-dimensional Skyrme kink model.
//!
//! The static field is a single angle `alpha(x)`. With coupling `lambda` and
//! period scale `L`, the energy density is
//!
//! ```text
//! H = 1/2 [ alpha'^2 + sin^2(alpha) / L^2 + (lambda / L^2) alpha'^2 sin^2(alpha) ]
//! ```
//!
//! and everything else in the crate (field equation, BPS equation, charge
//! density, the auxiliary `P+-` functions) is expressed through the functions
//! in this module.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coupling `lambda` and period scale `L`. `kappa = lambda / L^2` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    lambda: f64,
    big_l: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    lambda: f64,
    big_l: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.lambda, raw.big_l)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            lambda: p.lambda,
            big_l: p.big_l,
        }
    }
}

impl ModelParams {
    pub fn new(lambda: f64, big_l: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda must be finite and > 0, got {lambda}"
            )));
        }
        if !(big_l.is_finite() && big_l > 0.0) {
            return Err(Error::InvalidParams(format!(
                "L must be finite and > 0, got {big_l}"
            )));
        }
        Ok(Self { lambda, big_l })
    }

    /// Parameters with a prescribed `kappa` at fixed `L` (`lambda = kappa L^2`).
    pub fn from_kappa(kappa: f64, big_l: f64) -> Result<Self> {
        Self::new(kappa * big_l * big_l, big_l)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn big_l(&self) -> f64 {
        self.big_l
    }

    pub fn kappa(&self) -> f64 {
        self.lambda / (self.big_l * self.big_l)
    }

    /// `sqrt(L^2 + lambda sin^2(alpha))`, the metric factor of the first-order equation.
    #[inline]
    pub(crate) fn stiffness(&self, alpha: f64) -> f64 {
        let s = alpha.sin();
        (self.big_l * self.big_l + self.lambda * s * s).sqrt()
    }
}

/// Field value and its spatial derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointState {
    pub alpha: f64,
    pub dalpha: f64,
}

impl PointState {
    pub fn new(alpha: f64, dalpha: f64) -> Self {
        Self { alpha, dalpha }
    }
}

/// Which branch of `alpha' +- sin(alpha) / sqrt(L^2 + lambda sin^2 alpha) = 0`.
///
/// `Minus` is `alpha' = sin(alpha)/sqrt(..)`: on a vacuum interval with
/// `sin(alpha) > 0` it is the increasing kink. `Plus` is its mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KinkSign {
    Plus,
    Minus,
}

impl KinkSign {
    /// `+1` for `Plus`, `-1` for `Minus`, the sign in front of `sin(alpha)`.
    pub fn factor(self) -> f64 {
        match self {
            KinkSign::Plus => 1.0,
            KinkSign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            KinkSign::Plus => KinkSign::Minus,
            KinkSign::Minus => KinkSign::Plus,
        }
    }
}

pub fn energy_density(s: PointState, p: &ModelParams) -> f64 {
    let l2 = p.big_l * p.big_l;
    let sin2 = s.alpha.sin().powi(2);
    let d2 = s.dalpha * s.dalpha;
    0.5 * (d2 + sin2 / l2 + p.lambda / l2 * d2 * sin2)
}

/// `alpha'' - sin(2 alpha)(1 - lambda alpha'^2) / (2 (L^2 + lambda sin^2 alpha))`.
pub fn second_order_residual(alpha: f64, dalpha: f64, ddalpha: f64, p: &ModelParams) -> f64 {
    ddalpha - field_acceleration(alpha, dalpha, p)
}

/// Right-hand side of the second-order field equation solved for `alpha''`.
#[inline]
pub fn field_acceleration(alpha: f64, dalpha: f64, p: &ModelParams) -> f64 {
    let s = alpha.sin();
    let denom = 2.0 * (p.big_l * p.big_l + p.lambda * s * s);
    (2.0 * alpha).sin() * (1.0 - p.lambda * dalpha * dalpha) / denom
}

pub fn bps_residual(s: PointState, sign: KinkSign, p: &ModelParams) -> f64 {
    s.dalpha + sign.factor() * s.alpha.sin() / p.stiffness(s.alpha)
}

/// Slope of the BPS branch `sign` at field value `alpha`.
#[inline]
pub fn bps_slope(alpha: f64, sign: KinkSign, p: &ModelParams) -> f64 {
    -sign.factor() * alpha.sin() / p.stiffness(alpha)
}

/// `(P+, P-)` with `P+- = sqrt(L^2 + lambda sin^2 alpha) alpha' +- sin(alpha)`.
pub fn p_plus_minus(s: PointState, p: &ModelParams) -> (f64, f64) {
    let w = p.stiffness(s.alpha) * s.dalpha;
    let sin = s.alpha.sin();
    (w + sin, w - sin)
}

/// `(1/L) sin(alpha) sqrt(1 + kappa sin^2 alpha) alpha'`.
pub fn charge_density(s: PointState, p: &ModelParams) -> f64 {
    let sin = s.alpha.sin();
    sin * (1.0 + p.kappa() * sin * sin).sqrt() * s.dalpha / p.big_l
}

/// Index `n` of the vacuum `n pi` closest to `alpha`; exact half-way points go down.
pub fn vacuum_nearest(alpha: f64) -> i64 {
    let t = alpha / PI;
    let lower = t.floor();
    if t - lower <= 0.5 {
        lower as i64
    } else {
        lower as i64 + 1
    }
}
