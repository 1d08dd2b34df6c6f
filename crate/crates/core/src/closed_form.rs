//! Explicit integration of the first-order kink equation.
//!
//! In rescaled units (`x/L -> x`, `kappa = lambda/L^2`) the canonical kink
//! solves `alpha' = sin(alpha)/sqrt(1 + kappa sin^2 alpha)` with
//! `alpha(-inf) = 0`, `alpha(inf) = pi`. Writing `u = cos(alpha)` and
//! introducing `v` through
//!
//! ```text
//! sqrt(1 + kappa (1 - u^2)) = sqrt(1 + kappa) + u v,   u = -2 v sqrt(1+kappa) / (v^2 + kappa)
//! ```
//!
//! the integrand becomes rational in `v` and integrates to
//!
//! ```text
//! 2 sqrt(kappa) atan(v / sqrt(kappa)) - 1/2 ln |(v^2 + 2v - kappa) / (v^2 - 2v - kappa)| = x - x0
//! ```
//!
//! with `v(x0) = 0` at the kink center `alpha(x0) = pi/2`. This module exposes
//! the individual pieces of that construction and an [`ImplicitSolution`] that
//! inverts the relation to give `alpha(x)` in original units.
//!
//! The inversion does not bisect on `v` directly: `v - v_min` scales like
//! `alpha^2`, so a double-precision `v` only pins `alpha` to about `1e-8` near a
//! vacuum. Instead the same relation is rewritten as a function of `alpha`
//! with every endpoint factor expressed through `sin(alpha/2)` and
//! `cos(alpha/2)`, which keeps full relative precision into the tails.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{KinkSign, ModelParams, PointState};

/// Below this `kappa` the `v` substitution degenerates and the sine-Gordon
/// profile `2 atan(exp(x))` is used instead.
pub const SINE_GORDON_KAPPA: f64 = 1e-8;

/// Distance (in radians) from a vacuum below which `alpha_of_x` returns the
/// vacuum value exactly.
pub const TAIL_CLAMP: f64 = 1e-14;

const MAX_BISECTIONS: usize = 200;

/// Open interval of the transform variable `v` for a given `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VRange {
    pub v_min: f64,
    pub v_max: f64,
}

impl VRange {
    pub fn new(p: &ModelParams) -> Self {
        Self::for_kappa(p.kappa())
    }

    pub fn for_kappa(kappa: f64) -> Self {
        // sqrt(1+kappa) - 1 without cancellation
        let v_max = kappa / ((1.0 + kappa).sqrt() + 1.0);
        Self {
            v_min: -v_max,
            v_max,
        }
    }

    pub fn contains_open(&self, v: f64) -> bool {
        v > self.v_min && v < self.v_max
    }

    pub fn contains_closed(&self, v: f64) -> bool {
        v >= self.v_min && v <= self.v_max
    }
}

/// `u = cos(alpha) = -2 v sqrt(1+kappa) / (v^2 + kappa)` on the closed `VRange`.
pub fn u_of_v(v: f64, p: &ModelParams) -> Result<f64> {
    let range = VRange::new(p);
    if !range.contains_closed(v) {
        return Err(Error::Domain(format!(
            "v = {v} outside [{}, {}]",
            range.v_min, range.v_max
        )));
    }
    let kappa = p.kappa();
    let u = -2.0 * v * (1.0 + kappa).sqrt() / (v * v + kappa);
    Ok(u.clamp(-1.0, 1.0))
}

/// Transform variable of a field value on the fundamental branch `(0, pi)`.
///
/// Uses the rationalized form `v = -kappa cos(alpha) / (sqrt(1 + kappa sin^2) + sqrt(1 + kappa))`,
/// which has no removable singularity at `pi/2`.
pub fn v_of_alpha(alpha: f64, p: &ModelParams) -> Result<f64> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::Domain(format!("alpha = {alpha} outside (0, pi)")));
    }
    Ok(v_of_phi(alpha, p.kappa()))
}

#[inline]
fn v_of_phi(phi: f64, kappa: f64) -> f64 {
    if phi == FRAC_PI_2 {
        return 0.0;
    }
    let s = phi.sin();
    let a = (1.0 + kappa * s * s).sqrt();
    let b = (1.0 + kappa).sqrt();
    -kappa * phi.cos() / (a + b)
}

/// `1/2 ln |(v^2+2v-kappa)/(v^2-2v-kappa)| - 2 sqrt(kappa) atan(v/sqrt(kappa))`,
/// normalized to vanish at `v = 0`.
pub fn antiderivative(v: f64, p: &ModelParams) -> Result<f64> {
    let kappa = p.kappa();
    let range = VRange::for_kappa(kappa);
    if !range.contains_open(v) {
        return Err(Error::Singularity(format!(
            "v = {v} not strictly inside ({}, {})",
            range.v_min, range.v_max
        )));
    }
    let b = (1.0 + kappa).sqrt();
    // v^2 + 2v - kappa = (v - v_max)(v + 1 + b), v^2 - 2v - kappa = (v - v_min)(v - 1 - b)
    let ratio = ((v - range.v_max) * (v + 1.0 + b)) / ((v - range.v_min) * (v - 1.0 - b));
    let sk = kappa.sqrt();
    Ok(0.5 * ratio.abs().ln() - 2.0 * sk * (v / sk).atan())
}

/// Both sides of the partial-fraction decomposition of the `v` integrand:
///
/// ```text
/// -2(1+k)(v^2-k)^2 / ([(v^2-k)^2 - 4v^2](v^2+k))
///     = (v+1)/(v^2+2v-k) - (v-1)/(v^2-2v-k) - 2k/(v^2+k)
/// ```
pub fn partial_fraction_identity(v: f64, kappa: f64) -> Result<(f64, f64)> {
    let v2 = v * v;
    let d_plus = v2 + 2.0 * v - kappa;
    let d_minus = v2 - 2.0 * v - kappa;
    let d_sum = v2 + kappa;
    let quartic = (v2 - kappa).powi(2) - 4.0 * v2;
    if d_plus == 0.0 || d_minus == 0.0 || d_sum == 0.0 || quartic == 0.0 {
        return Err(Error::Singularity(format!(
            "v = {v} is a pole of the integrand for kappa = {kappa}"
        )));
    }
    let lhs = -2.0 * (1.0 + kappa) * (v2 - kappa).powi(2) / (quartic * d_sum);
    let rhs = (v + 1.0) / d_plus - (v - 1.0) / d_minus - 2.0 * kappa / d_sum;
    Ok((lhs, rhs))
}

/// Rescaled position of the canonical kink at field value `phi in (0, pi)`.
///
/// Algebraically equal to `-antiderivative(v_of_alpha(phi))`, rearranged so
/// that the endpoint singularities appear only through `ln tan(phi/2)`.
pub(crate) fn canonical_position(phi: f64, kappa: f64) -> f64 {
    let half = 0.5 * phi;
    let lt = half.tan().ln();
    if kappa < SINE_GORDON_KAPPA {
        return lt;
    }
    let (sh, ch) = half.sin_cos();
    let s = phi.sin();
    let a = (1.0 + kappa * s * s).sqrt();
    let b = (1.0 + kappa).sqrt();
    let v = -kappa * phi.cos() / (a + b);
    let sk = kappa.sqrt();
    let endpoint = ((b + 1.0) + 2.0 * kappa * sh * sh / (a + 1.0)).ln()
        - ((b + 1.0) + 2.0 * kappa * ch * ch / (a + 1.0)).ln();
    let shift = (1.0 + b + v).ln() - (1.0 + b - v).ln();
    lt + 2.0 * sk * (v / sk).atan() - 0.5 * endpoint - 0.5 * shift
}

/// `d phi / d t` of the canonical kink, computed through `dt/dv * dv/dphi`
/// of the implicit relation (not through the differential equation).
pub(crate) fn canonical_slope(phi: f64, kappa: f64) -> f64 {
    if kappa < SINE_GORDON_KAPPA {
        return phi.sin();
    }
    let (sh, ch) = (0.5 * phi).sin_cos();
    let s = phi.sin();
    let c = phi.cos();
    let a = (1.0 + kappa * s * s).sqrt();
    let b = (1.0 + kappa).sqrt();
    let v = -kappa * c / (a + b);
    let scale = (a + b) * (b + 1.0);
    let below_max =
        -2.0 * kappa * ch * ch * ((b + 1.0) + 2.0 * kappa * sh * sh / (a + 1.0)) / scale;
    let above_min = 2.0 * kappa * sh * sh * ((b + 1.0) + 2.0 * kappa * ch * ch / (a + 1.0)) / scale;
    let quartic = below_max * (v + 1.0 + b) * above_min * (v - 1.0 - b);
    let v2 = v * v;
    let di_dv = -2.0 * (1.0 + kappa) * (v2 - kappa).powi(2) / (quartic * (v2 + kappa));
    let dv_dphi = kappa * s / (a + b) * (1.0 + kappa * c * c / (a * (a + b)));
    1.0 / (-di_dv * dv_dphi)
}

/// Canonical kink field at rescaled position `t` (kink center at `t = 0`).
fn canonical_field(t: f64, kappa: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::Domain("position is NaN".into()));
    }
    if kappa < SINE_GORDON_KAPPA {
        return Ok(2.0 * t.exp().atan());
    }
    if t == 0.0 {
        return Ok(FRAC_PI_2);
    }
    if t <= canonical_position(TAIL_CLAMP, kappa) {
        return Ok(0.0);
    }
    if t >= canonical_position(PI - TAIL_CLAMP, kappa) {
        return Ok(PI);
    }
    let (mut lo, mut hi) = if t < 0.0 {
        (TAIL_CLAMP, FRAC_PI_2)
    } else {
        (FRAC_PI_2, PI - TAIL_CLAMP)
    };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= f64::EPSILON * mid {
            return Ok(mid);
        }
        if canonical_position(mid, kappa) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric(format!(
        "bisection for t = {t} did not converge (bracket [{lo}, {hi}])"
    )))
}

/// Result of reducing a boundary pair `(m, n)` to the canonical kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchMap {
    pub vacuum_base: i64,
    pub sign: KinkSign,
    pub valid: bool,
}

/// Maps `alpha(-inf) = m pi`, `alpha(inf) = n pi` to a vacuum base and BPS branch.
///
/// Only adjacent vacua are joined by a nontrivial finite-energy solution. The
/// base is `min(m, n)`; for an odd base `sin(alpha) < 0` on the interval, so
/// the increasing kink lives on the `Plus` branch there.
pub fn branch_map(m: i64, n: i64) -> BranchMap {
    let vacuum_base = m.min(n);
    let adjacent = m.abs_diff(n) == 1;
    let increasing = m < n;
    let even = vacuum_base.rem_euclid(2) == 0;
    let sign = if increasing == even {
        KinkSign::Minus
    } else {
        KinkSign::Plus
    };
    BranchMap {
        vacuum_base,
        sign,
        valid: adjacent,
    }
}

/// Closed-form kink in original coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplicitSolution {
    pub params: ModelParams,
    pub x0: f64,
    pub sign: KinkSign,
    pub vacuum_base: i64,
}

impl ImplicitSolution {
    pub fn new(params: ModelParams, x0: f64, sign: KinkSign, vacuum_base: i64) -> Self {
        Self {
            params,
            x0,
            sign,
            vacuum_base,
        }
    }

    /// Increasing kink from `0` to `pi` centered at `x0`.
    pub fn canonical(params: ModelParams, x0: f64) -> Self {
        Self::new(params, x0, KinkSign::Minus, 0)
    }

    pub fn from_branch(params: ModelParams, x0: f64, m: i64, n: i64) -> Result<Self> {
        let map = branch_map(m, n);
        if !map.valid {
            return Err(Error::NonAdjacentVacua { m, n });
        }
        Ok(Self::new(params, x0, map.sign, map.vacuum_base))
    }

    /// Whether `alpha` increases from `vacuum_base pi` to `(vacuum_base + 1) pi`.
    pub fn increasing(&self) -> bool {
        let even = self.vacuum_base.rem_euclid(2) == 0;
        (self.sign == KinkSign::Minus) == even
    }

    /// Vacuum indices `(m, n)` at `x = -inf` and `x = +inf`.
    pub fn boundary(&self) -> (i64, i64) {
        if self.increasing() {
            (self.vacuum_base, self.vacuum_base + 1)
        } else {
            (self.vacuum_base + 1, self.vacuum_base)
        }
    }

    pub fn translated(&self, delta: f64) -> Self {
        Self {
            x0: self.x0 + delta,
            ..*self
        }
    }

    /// Mirror image `x -> 2 x0 - x` (kink <-> antikink on the same interval).
    pub fn reflected(&self) -> Self {
        Self {
            sign: self.sign.flipped(),
            ..*self
        }
    }

    fn rescaled(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.params.big_l();
        if self.increasing() {
            t
        } else {
            -t
        }
    }

    /// Position where the kink crosses the transform value `v`.
    pub fn x_of_v(&self, v: f64) -> Result<f64> {
        let t = -antiderivative(v, &self.params)?;
        let t = if self.increasing() { t } else { -t };
        Ok(self.x0 + self.params.big_l() * t)
    }

    /// Position where the kink takes the value `alpha`, strictly between its vacua.
    pub fn x_of_alpha(&self, alpha: f64) -> Result<f64> {
        let phi = alpha - self.vacuum_base as f64 * PI;
        if !(phi > 0.0 && phi < PI) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} outside the open vacuum interval of base {}",
                self.vacuum_base
            )));
        }
        let t = canonical_position(phi, self.params.kappa());
        let t = if self.increasing() { t } else { -t };
        Ok(self.x0 + self.params.big_l() * t)
    }

    pub fn alpha_of_x(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("x = {x} is not finite")));
        }
        let phi = canonical_field(self.rescaled(x), self.params.kappa())?;
        Ok(self.vacuum_base as f64 * PI + phi)
    }

    /// Field and exact derivative at `x`.
    pub fn state_at(&self, x: f64) -> Result<PointState> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("x = {x} is not finite")));
        }
        let t = self.rescaled(x);
        let kappa = self.params.kappa();
        let phi = canonical_field(t, kappa)?;
        let slope = if kappa < SINE_GORDON_KAPPA {
            1.0 / t.cosh()
        } else if phi <= 0.0 || phi >= PI {
            0.0
        } else {
            canonical_slope(phi, kappa)
        };
        let dir = if self.increasing() { 1.0 } else { -1.0 };
        Ok(PointState::new(
            self.vacuum_base as f64 * PI + phi,
            dir * slope / self.params.big_l(),
        ))
    }

    /// Distance from `x0` at which the kink is within `gap` of its vacua,
    /// the larger of the two sides.
    pub fn half_width(&self, gap: f64) -> Result<f64> {
        if !(gap > 0.0 && gap < FRAC_PI_2) {
            return Err(Error::Domain(format!("gap = {gap} outside (0, pi/2)")));
        }
        let kappa = self.params.kappa();
        let left = canonical_position(gap, kappa).abs();
        let right = canonical_position(PI - gap, kappa).abs();
        Ok(self.params.big_l() * left.max(right))
    }
}

/// Sine-Gordon kink `2 atan(exp((x - x0)/L))`, the `lambda -> 0` limit.
pub fn sine_gordon_alpha(x: f64, x0: f64, big_l: f64) -> f64 {
    2.0 * ((x - x0) / big_l).exp().atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bps_residual, charge_density};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(kappa: f64) -> ModelParams {
        ModelParams::from_kappa(kappa, 1.0).unwrap()
    }

    /// Direct form `(sqrt(1 + kappa sin^2) - sqrt(1 + kappa)) / cos`.
    fn v_direct(alpha: f64, kappa: f64) -> f64 {
        ((1.0 + kappa * alpha.sin().powi(2)).sqrt() - (1.0 + kappa).sqrt()) / alpha.cos()
    }

    /// Composite Gauss-Legendre (5 pt) on [a, b] with n panels.
    fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let nodes = [
            (0.0, 128.0 / 225.0),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let h = (b - a) / n as f64;
        (0..n)
            .map(|i| {
                let mid = a + (i as f64 + 0.5) * h;
                nodes
                    .iter()
                    .map(|&(z, w)| w * f(mid + 0.5 * h * z))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }

    #[test]
    fn vrange_endpoints_are_log_singularities() {
        for kappa in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let r = VRange::for_kappa(kappa);
            assert!(r.v_min < 0.0 && r.v_max > 0.0);
            let vm = r.v_max;
            assert!((vm * vm + 2.0 * vm - kappa).abs() < 1e-14 * (1.0 + kappa));
            let vn = r.v_min;
            assert!((vn * vn - 2.0 * vn - kappa).abs() < 1e-14 * (1.0 + kappa));
        }
    }

    #[test]
    fn u_of_v_examples() {
        for kappa in [0.5, 1.0, 3.0] {
            let p = params(kappa);
            let r = VRange::new(&p);
            assert_eq!(u_of_v(0.0, &p).unwrap(), 0.0);
            assert!((u_of_v(r.v_min, &p).unwrap() - 1.0).abs() < 1e-14);
            assert!((u_of_v(r.v_max, &p).unwrap() + 1.0).abs() < 1e-14);
            assert!(u_of_v(r.v_max * 1.01, &p).is_err());
            assert!(u_of_v(r.v_min * 1.01, &p).is_err());
        }
    }

    #[test]
    fn v_of_alpha_examples() {
        let p = params(1.0);
        assert_eq!(v_of_alpha(FRAC_PI_2, &p).unwrap(), 0.0);
        let r = VRange::new(&p);
        let v = v_of_alpha(1e-9, &p).unwrap();
        assert!((v - r.v_min).abs() < 1e-15);
        assert!((u_of_v(r.v_min, &p).unwrap() - 0f64.cos()).abs() < 1e-15);
        assert!(v_of_alpha(0.0, &p).is_err());
        assert!(v_of_alpha(PI, &p).is_err());
        assert!(v_of_alpha(-1.0, &p).is_err());
    }

    #[test]
    fn v_of_alpha_matches_direct_formula_away_from_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let kappa = 10f64.powf(rng.gen_range(-2.0..2.0));
            let alpha: f64 = rng.gen_range(0.01..PI - 0.01);
            if (alpha - FRAC_PI_2).abs() < 1e-3 {
                continue;
            }
            let v = v_of_alpha(alpha, &params(kappa)).unwrap();
            let d = v_direct(alpha, kappa);
            assert!((v - d).abs() < 1e-12 * (1.0 + d.abs()), "{alpha} {kappa}");
        }
    }

    #[test]
    fn v_of_alpha_is_continuous_through_center() {
        // the series -kappa cos/(2 sqrt(1+kappa)) is the leading behaviour
        let kappa = 1.0;
        let p = params(kappa);
        for eps in [1e-3, 1e-6, 1e-9, 1e-12] {
            let v = v_of_alpha(FRAC_PI_2 + eps, &p).unwrap();
            let series = -kappa * (FRAC_PI_2 + eps).cos() / (2.0 * (1.0 + kappa).sqrt());
            assert!(
                (v - series).abs() <= 1e-6 * eps + 1e-20,
                "{eps}: {v} vs {series}"
            );
        }
    }

    #[test]
    fn u_v_round_trip() {
        let p = params(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let alpha: f64 = rng.gen_range(0.0..PI);
            if alpha == 0.0 {
                continue;
            }
            let u = u_of_v(v_of_alpha(alpha, &p).unwrap(), &p).unwrap();
            worst = worst.max((u - alpha.cos()).abs());
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn antiderivative_examples() {
        let p = params(1.0);
        assert_eq!(antiderivative(0.0, &p).unwrap(), 0.0);
        let r = VRange::new(&p);
        assert!(antiderivative(r.v_max, &p).is_err());
        assert!(antiderivative(r.v_min, &p).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let v = rng.gen_range(r.v_min..r.v_max);
            if !r.contains_open(v) {
                continue;
            }
            let a = antiderivative(v, &p).unwrap();
            let b = antiderivative(-v, &p).unwrap();
            assert!((a + b).abs() < 1e-13, "{v}");
        }
    }

    #[test]
    fn antiderivative_derivative_matches_integrand() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kappa in [0.5, 1.0, 3.0] {
            let p = params(kappa);
            let r = VRange::new(&p);
            for _ in 0..200 {
                let v = rng.gen_range(0.9 * r.v_min..0.9 * r.v_max);
                let h = 1e-5 * (r.v_max - r.v_min);
                let fd = (antiderivative(v + h, &p).unwrap() - antiderivative(v - h, &p).unwrap())
                    / (2.0 * h);
                let (lhs, _) = partial_fraction_identity(v, kappa).unwrap();
                assert!(((fd - lhs) / lhs).abs() < 1e-6, "{kappa} {v}: {fd} {lhs}");
            }
        }
    }

    #[test]
    fn partial_fraction_examples() {
        // v = 1 is v_max for kappa = 3: the identity is evaluated just inside it
        assert!(partial_fraction_identity(1.0, 3.0).is_err());
        let (l, r) = partial_fraction_identity(0.999, 3.0).unwrap();
        assert!((l - r).abs() < 1e-13 * (1.0 + l.abs()));
        let (l, r) = partial_fraction_identity(1.5, 3.0).unwrap();
        assert!((l - r).abs() < 1e-13 * (1.0 + l.abs()));
        let (l, r) = partial_fraction_identity(0.0, 1.0).unwrap();
        // -2(1+k) k^2 / (k^2 k) at v = 0
        assert!((l + 4.0).abs() < 1e-13);
        assert!((l - r).abs() < 1e-13);
        // v^2 - 2v - k = 0 at v = 3, k = 3
        assert!(partial_fraction_identity(3.0, 3.0).is_err());
    }

    #[test]
    fn position_matches_antiderivative_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let kappa = 10f64.powf(rng.gen_range(-3.0..3.0));
            let p = params(kappa);
            let phi: f64 = rng.gen_range(0.05..PI - 0.05);
            let v = v_of_alpha(phi, &p).unwrap();
            let direct = -antiderivative(v, &p).unwrap();
            let factored = canonical_position(phi, kappa);
            assert!(
                (direct - factored).abs() < 1e-11 * (1.0 + direct.abs()),
                "kappa {kappa} phi {phi}: {direct} {factored}"
            );
        }
    }

    #[test]
    fn slope_matches_finite_difference_of_position() {
        for kappa in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            for phi in [1e-6, 0.01, 0.5, FRAC_PI_2, 2.0, PI - 1e-4] {
                let h = 1e-6 * phi.min(PI - phi);
                let dt = (canonical_position(phi + h, kappa) - canonical_position(phi - h, kappa))
                    / (2.0 * h);
                let slope = canonical_slope(phi, kappa);
                assert!(((1.0 / dt - slope) / slope).abs() < 1e-7, "{kappa} {phi}");
            }
        }
    }

    #[test]
    fn x_of_v_examples() {
        let p = params(1.0);
        let sol = ImplicitSolution::canonical(p, 0.0);
        assert_eq!(sol.x_of_v(0.0).unwrap(), 0.0);
        let r = VRange::new(&p);
        let a = sol.x_of_v(0.99 * r.v_max).unwrap();
        let b = sol.x_of_v(0.999 * r.v_max).unwrap();
        assert!(b > a && a > 0.0);
        assert!(sol.x_of_v(r.v_max).is_err());
    }

    #[test]
    fn x_of_v_matches_ode_quadrature() {
        // x(alpha) = int_{pi/2}^{alpha} sqrt(1 + kappa sin^2 a) / sin a da
        let p = params(1.0);
        let sol = ImplicitSolution::canonical(p, 0.0);
        let v = 0.2;
        let alpha_end = u_of_v(v, &p).unwrap().acos();
        let oracle = gauss_legendre(
            |a| (1.0 + a.sin().powi(2)).sqrt() / a.sin(),
            FRAC_PI_2,
            alpha_end,
            64,
        );
        let x = sol.x_of_v(v).unwrap();
        assert!((x - oracle).abs() < 1e-10, "{x} vs {oracle}");
    }

    #[test]
    fn x_of_v_strictly_increasing_on_grid() {
        for kappa in [0.1, 1.0, 10.0] {
            let p = params(kappa);
            let sol = ImplicitSolution::canonical(p, 0.0);
            let r = VRange::new(&p);
            let n = 10_000;
            let mut prev = f64::NEG_INFINITY;
            for i in 1..n {
                let v = r.v_min + (r.v_max - r.v_min) * i as f64 / n as f64;
                let x = sol.x_of_v(v).unwrap();
                assert!(x > prev, "kappa {kappa} i {i}");
                prev = x;
            }
        }
    }

    #[test]
    fn alpha_of_x_examples() {
        let p = params(1.0);
        let sol = ImplicitSolution::canonical(p, 1.25);
        assert_eq!(sol.alpha_of_x(1.25).unwrap(), FRAC_PI_2);
        assert_eq!(sol.alpha_of_x(-200.0).unwrap(), 0.0);
        assert_eq!(sol.alpha_of_x(200.0).unwrap(), PI);
        assert!(sol.alpha_of_x(f64::NAN).is_err());
        let shifted = ImplicitSolution::new(p, 0.0, KinkSign::Minus, 4);
        assert_eq!(shifted.alpha_of_x(0.0).unwrap(), 4.0 * PI + FRAC_PI_2);
    }

    #[test]
    fn sine_gordon_limit() {
        let p = ModelParams::from_kappa(1e-9, 1.0).unwrap();
        let sol = ImplicitSolution::canonical(p, 0.0);
        for x in [-2.0, 0.0, 2.0] {
            let a = sol.alpha_of_x(x).unwrap();
            assert!((a - 2.0 * x.exp().atan()).abs() < 1e-8);
        }
        // just above the switch the general path agrees to O(kappa)
        let p = ModelParams::from_kappa(1e-6, 1.0).unwrap();
        let sol = ImplicitSolution::canonical(p, 0.0);
        for x in [-5.0, -2.0, 0.5, 2.0, 6.0] {
            let a = sol.alpha_of_x(x).unwrap();
            assert!((a - sine_gordon_alpha(x, 0.0, 1.0)).abs() < 1e-5, "{x}");
        }
    }

    #[test]
    fn chain_v_to_x_to_alpha_to_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for kappa in [0.1, 1.0, 10.0] {
            let p = params(kappa);
            let sol = ImplicitSolution::canonical(p, 0.3);
            let r = VRange::new(&p);
            for _ in 0..200 {
                let v = rng.gen_range(0.999 * r.v_min..0.999 * r.v_max);
                let x = sol.x_of_v(v).unwrap();
                let alpha = sol.alpha_of_x(x).unwrap();
                let back = v_of_alpha(alpha, &p).unwrap();
                assert!((back - v).abs() < 1e-10, "{kappa} {v} {back}");
            }
        }
    }

    #[test]
    fn closed_form_solves_bps_equation() {
        for kappa in [0.1, 1.0, 10.0] {
            let p = ModelParams::from_kappa(kappa, 1.7).unwrap();
            let sol = ImplicitSolution::canonical(p, -0.4);
            let mut worst: f64 = 0.0;
            for i in 0..1000 {
                let x = -0.4 + -20.0 + 40.0 * i as f64 / 999.0;
                let s = sol.state_at(x).unwrap();
                worst = worst.max(bps_residual(s, KinkSign::Minus, &p).abs());
            }
            assert!(worst < 1e-8, "kappa {kappa}: {worst}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = params(3.0);
        let sol = ImplicitSolution::canonical(p, 0.0);
        let h = 1e-5;
        for x in [-6.0, -1.0, 0.0, 0.7, 4.0] {
            let fd = (sol.alpha_of_x(x + h).unwrap() - sol.alpha_of_x(x - h).unwrap()) / (2.0 * h);
            let d = sol.state_at(x).unwrap().dalpha;
            assert!((fd - d).abs() < 1e-8, "{x}: {fd} {d}");
        }
    }

    #[test]
    fn translation_and_reflection() {
        let p = params(1.0);
        let sol = ImplicitSolution::canonical(p, 0.5);
        let moved = sol.translated(2.25);
        let mirror = sol.reflected();
        for x in [-7.0, -1.3, 0.0, 0.5, 2.0, 9.0] {
            let a = sol.alpha_of_x(x).unwrap();
            assert!((moved.alpha_of_x(x + 2.25).unwrap() - a).abs() < 1e-12);
            assert!((mirror.alpha_of_x(2.0 * 0.5 - x).unwrap() - a).abs() < 1e-12);
        }
        assert_eq!(mirror.boundary(), (1, 0));
    }

    #[test]
    fn branch_map_examples() {
        assert_eq!(
            branch_map(0, 1),
            BranchMap {
                vacuum_base: 0,
                sign: KinkSign::Minus,
                valid: true
            }
        );
        assert_eq!(
            branch_map(1, 0),
            BranchMap {
                vacuum_base: 0,
                sign: KinkSign::Plus,
                valid: true
            }
        );
        assert!(!branch_map(0, 2).valid);
        assert!(!branch_map(3, 3).valid);
        assert!(!branch_map(-4, 5).valid);
    }

    #[test]
    fn every_adjacent_branch_satisfies_its_sign() {
        let p = params(1.0);
        for m in -3..=3 {
            for n in [m - 1, m + 1] {
                let sol = ImplicitSolution::from_branch(p, 0.0, m, n).unwrap();
                assert_eq!(sol.boundary(), (m, n));
                let left = sol.alpha_of_x(-100.0).unwrap();
                let right = sol.alpha_of_x(100.0).unwrap();
                assert!((left - m as f64 * PI).abs() < 1e-12);
                assert!((right - n as f64 * PI).abs() < 1e-12);
                for x in [-3.0, -0.5, 0.0, 1.0, 4.0] {
                    let s = sol.state_at(x).unwrap();
                    assert!(bps_residual(s, sol.sign, &p).abs() < 1e-10, "{m} {n} {x}");
                }
                // charge density sign follows the branch
                let q = charge_density(sol.state_at(0.3).unwrap(), &p);
                assert_eq!(q > 0.0, sol.sign == KinkSign::Minus);
            }
        }
        assert!(matches!(
            ImplicitSolution::from_branch(p, 0.0, 0, 2),
            Err(Error::NonAdjacentVacua { m: 0, n: 2 })
        ));
    }

    #[test]
    fn tails_keep_relative_precision() {
        // ln alpha grows with slope 1/L deep in the left tail
        let p = ModelParams::from_kappa(1.0, 2.0).unwrap();
        let sol = ImplicitSolution::canonical(p, 0.0);
        let a1 = sol.alpha_of_x(-40.0).unwrap();
        let a2 = sol.alpha_of_x(-44.0).unwrap();
        assert!(a1 > 0.0 && a2 > 0.0);
        let rate = (a1.ln() - a2.ln()) / 4.0;
        assert!((rate - 0.5).abs() < 1e-6, "{rate}");
    }
}
