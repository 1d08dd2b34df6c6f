//! Numerical machinery independent of the closed form: adaptive integration
//! of the first-order equation, shooting for the second-order boundary value
//! problem, quadrature and finite differences.

mod bps;
mod bvp;
mod fd;
pub mod quadrature;
pub mod rk;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::closed_form::ImplicitSolution;
use crate::error::{Error, Result};
use crate::model::{KinkSign, ModelParams, PointState};

pub use bps::{integrate_bps, integrate_bps_branch};
pub use bvp::solve_second_order_bvp;
pub use fd::{differentiate, second_derivative};
pub use quadrature::{quadrature, trapezoid};

/// Default number of samples on an output grid.
pub const DEFAULT_POINTS: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Distance from the vacuum at which the infinite line is truncated.
    pub tail_cut: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            tail_cut: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParams(format!("rel_tol = {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParams(format!("abs_tol = {}", self.abs_tol)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParams("max_steps = 0".into()));
        }
        if !(self.tail_cut > 0.0 && self.tail_cut < PI / 4.0) {
            return Err(Error::InvalidParams(format!(
                "tail_cut = {} outside (0, pi/4)",
                self.tail_cut
            )));
        }
        Ok(())
    }
}

/// Strictly increasing sample abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;
    fn try_from(points: Vec<f64>) -> Result<Self> {
        Grid::new(points)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Self {
        g.points
    }
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("grid contains non-finite points".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid is not strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn uniform(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(x_min < x_max) {
            return Err(Error::Domain(format!(
                "uniform grid needs x_min < x_max and n >= 2 (got [{x_min}, {x_max}], {n})"
            )));
        }
        let h = (x_max - x_min) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| x_min + i as f64 * h).collect();
        points[n - 1] = x_max;
        Self::new(points)
    }

    /// Uniform grid centered on `x0` reaching out to where the kink is
    /// `tail_cut` away from its vacua.
    pub fn for_kink(params: &ModelParams, x0: f64, cfg: &SolverConfig, n: usize) -> Result<Self> {
        let half = Self::kink_half_width(params, cfg)?;
        Self::uniform(x0 - half, x0 + half, n)
    }

    /// Half-width used by [`Grid::for_kink`]: the distance from the center to
    /// the point where the kink is `tail_cut` away from the vacuum.
    pub fn kink_half_width(params: &ModelParams, cfg: &SolverConfig) -> Result<f64> {
        cfg.validate()?;
        ImplicitSolution::canonical(*params, 0.0).half_width(cfg.tail_cut)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.points[0]
    }

    pub fn x_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x_min() + self.x_max())
    }

    /// Common spacing if the grid is uniform to `tol`.
    pub fn uniform_step(&self, tol: f64) -> Option<f64> {
        let h = (self.x_max() - self.x_min()) / (self.len() - 1) as f64;
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= tol * h.abs().max(1.0))
            .then_some(h)
    }

    pub fn translated(&self, delta: f64) -> Self {
        Self {
            points: self.points.iter().map(|x| x + delta).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    OdeFirstOrder,
    BvpSecondOrder,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::OdeFirstOrder => "ode_first_order",
            Provenance::BvpSecondOrder => "bvp_second_order",
        }
    }
}

/// Sampled field `alpha` and derivative `alpha'` of one kink branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkProfile {
    pub grid: Grid,
    pub alpha: Vec<f64>,
    pub dalpha: Vec<f64>,
    pub params: ModelParams,
    pub sign: KinkSign,
    pub vacuum_base: i64,
    pub provenance: Provenance,
}

impl KinkProfile {
    pub fn new(
        grid: Grid,
        alpha: Vec<f64>,
        dalpha: Vec<f64>,
        params: ModelParams,
        sign: KinkSign,
        vacuum_base: i64,
        provenance: Provenance,
    ) -> Result<Self> {
        if alpha.len() != grid.len() || dalpha.len() != grid.len() {
            return Err(Error::Domain(format!(
                "profile arrays ({}, {}) do not match grid length {}",
                alpha.len(),
                dalpha.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            alpha,
            dalpha,
            params,
            sign,
            vacuum_base,
            provenance,
        })
    }

    /// Samples the closed-form solution on `grid`.
    pub fn from_closed_form(sol: &ImplicitSolution, grid: Grid) -> Result<Self> {
        let mut alpha = Vec::with_capacity(grid.len());
        let mut dalpha = Vec::with_capacity(grid.len());
        for &x in grid.points() {
            let s = sol.state_at(x)?;
            alpha.push(s.alpha);
            dalpha.push(s.dalpha);
        }
        Self::new(
            grid,
            alpha,
            dalpha,
            sol.params,
            sol.sign,
            sol.vacuum_base,
            Provenance::ClosedForm,
        )
    }

    /// Constant profile sitting in the vacuum `n pi`.
    pub fn vacuum(params: ModelParams, n: i64, grid: Grid, provenance: Provenance) -> Self {
        let len = grid.len();
        Self {
            grid,
            alpha: vec![n as f64 * PI; len],
            dalpha: vec![0.0; len],
            params,
            sign: KinkSign::Minus,
            vacuum_base: n,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn states(&self) -> impl Iterator<Item = PointState> + '_ {
        self.alpha
            .iter()
            .zip(&self.dalpha)
            .map(|(&a, &d)| PointState::new(a, d))
    }

    pub fn is_vacuum(&self) -> bool {
        self.dalpha.iter().all(|&d| d == 0.0) && self.alpha.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_strictly_monotone(&self) -> bool {
        self.alpha.windows(2).all(|w| w[1] > w[0]) || self.alpha.windows(2).all(|w| w[1] < w[0])
    }

    /// Position where the profile crosses `(vacuum_base + 1/2) pi`, located on
    /// the cubic Hermite interpolant of the samples.
    pub fn center(&self) -> Option<f64> {
        let target = (self.vacuum_base as f64 + 0.5) * PI;
        let xs = self.xs();
        for i in 0..self.len().saturating_sub(1) {
            let (a0, a1) = (self.alpha[i] - target, self.alpha[i + 1] - target);
            if a0 == 0.0 {
                return Some(xs[i]);
            }
            if a0.signum() == a1.signum() && a1 != 0.0 {
                continue;
            }
            let h = xs[i + 1] - xs[i];
            let (d0, d1) = (self.dalpha[i] * h, self.dalpha[i + 1] * h);
            let hermite = |t: f64| {
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * a0
                    + (t3 - 2.0 * t2 + t) * d0
                    + (-2.0 * t3 + 3.0 * t2) * a1
                    + (t3 - t2) * d1
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            let s0 = a0.signum();
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if hermite(mid).signum() == s0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(xs[i] + 0.5 * (lo + hi) * h);
        }
        None
    }

    /// Same profile with abscissae shifted by `delta`.
    pub fn translated(&self, delta: f64) -> Self {
        Self {
            grid: self.grid.translated(delta),
            ..self.clone()
        }
    }

    /// Mirror image `x -> x_min + x_max - x` (kink <-> antikink).
    pub fn reflected(&self) -> Self {
        let (lo, hi) = (self.grid.x_min(), self.grid.x_max());
        let points: Vec<f64> = self.xs().iter().rev().map(|x| lo + hi - x).collect();
        Self {
            grid: Grid { points },
            alpha: self.alpha.iter().rev().copied().collect(),
            dalpha: self.dalpha.iter().rev().map(|d| -d).collect(),
            sign: if self.is_vacuum() {
                self.sign
            } else {
                self.sign.flipped()
            },
            ..self.clone()
        }
    }

    /// Largest `|alpha_i - other(x_i)|` against another profile on the same grid.
    pub fn sup_distance(&self, other: &KinkProfile) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Domain("profiles have different lengths".into()));
        }
        Ok(self
            .alpha
            .iter()
            .zip(&other.alpha)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
