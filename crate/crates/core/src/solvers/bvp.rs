use std::f64::consts::PI;

use super::rk::Dopri5;
use super::{Grid, KinkProfile, Provenance, SolverConfig};
use crate::closed_form::branch_map;
use crate::error::{Error, Result};
use crate::model::{field_acceleration, ModelParams};

const MAX_SHOTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shot {
    /// Trajectory turned back or stayed below the right-hand target.
    Low(Option<f64>),
    /// Trajectory crossed the vacuum or ended above the target.
    High(Option<f64>),
}

impl Shot {
    fn miss(self) -> Option<f64> {
        match self {
            Shot::Low(m) | Shot::High(m) => m,
        }
    }
}

struct Shooter<'a> {
    p: &'a ModelParams,
    cfg: &'a SolverConfig,
    xs: &'a [f64],
    start: f64,
    target: f64,
}

impl Shooter<'_> {
    fn rk(&self) -> Dopri5 {
        Dopri5::new(
            self.cfg.rel_tol,
            self.cfg.abs_tol,
            self.cfg.max_steps,
            0.01 * self.p.big_l(),
        )
    }

    fn rhs(&self) -> impl FnMut(f64, &[f64; 2]) -> [f64; 2] + '_ {
        |_x, y| [y[1], field_acceleration(y[0], y[1], self.p)]
    }

    fn classify(&self, slope: f64) -> Result<Shot> {
        let mut rk = self.rk();
        let mut f = self.rhs();
        let mut y = [self.start, slope];
        for w in self.xs.windows(2) {
            y = rk.advance(&mut f, w[0], y, w[1])?;
            if y[1] <= 0.0 {
                return Ok(Shot::Low(None));
            }
            if y[0] > PI {
                return Ok(Shot::High(None));
            }
        }
        let miss = y[0] - self.target;
        Ok(if miss < 0.0 {
            Shot::Low(Some(miss))
        } else {
            Shot::High(Some(miss))
        })
    }

    fn trajectory(&self, slope: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut rk = self.rk();
        let mut f = self.rhs();
        let mut y = [self.start, slope];
        let mut alpha = Vec::with_capacity(self.xs.len());
        let mut dalpha = Vec::with_capacity(self.xs.len());
        alpha.push(y[0]);
        dalpha.push(y[1]);
        for w in self.xs.windows(2) {
            y = rk.advance(&mut f, w[0], y, w[1])?;
            alpha.push(y[0]);
            dalpha.push(y[1]);
        }
        Ok((alpha, dalpha))
    }
}

/// Solves the second-order field equation between the vacua `m pi` (at the
/// left end of `grid`) and `n pi` (right end) by shooting.
///
/// The line is truncated `tail_cut` away from the vacua: the canonical
/// problem starts at `alpha(x_min) = tail_cut` with unknown slope, bracketed
/// in `[0, 2/L]` and bisected until `alpha(x_max) = pi - tail_cut`. Other
/// adjacent pairs follow from `alpha -> pi - alpha` and shifts by `pi`, under
/// which the equation is invariant. The result is translated so that the
/// kink center sits on the grid midpoint.
pub fn solve_second_order_bvp(
    p: &ModelParams,
    boundary: (i64, i64),
    cfg: &SolverConfig,
    grid: &Grid,
) -> Result<KinkProfile> {
    cfg.validate()?;
    let (m, n) = boundary;
    if m == n {
        return Ok(KinkProfile::vacuum(
            *p,
            m,
            grid.clone(),
            Provenance::BvpSecondOrder,
        ));
    }
    let map = branch_map(m, n);
    if !map.valid {
        return Err(Error::NonAdjacentVacua { m, n });
    }

    let shooter = Shooter {
        p,
        cfg,
        xs: grid.points(),
        start: cfg.tail_cut,
        target: PI - cfg.tail_cut,
    };
    let (mut lo, mut hi) = (0.0, 2.0 / p.big_l());
    let (shot_lo, shot_hi) = (shooter.classify(lo)?, shooter.classify(hi)?);
    if !matches!(shot_lo, Shot::Low(_)) || !matches!(shot_hi, Shot::High(_)) {
        return Err(Error::Numeric(format!(
            "shooting bracket not found on [{}, {}]: slope {lo} -> {shot_lo:?}, slope {hi} -> {shot_hi:?}",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let mut best = (f64::INFINITY, lo);
    for _ in 0..MAX_SHOTS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let shot = shooter.classify(mid)?;
        if let Some(miss) = shot.miss() {
            if miss.abs() < best.0 {
                best = (miss.abs(), mid);
            }
            if miss.abs() <= cfg.abs_tol {
                break;
            }
        }
        match shot {
            Shot::Low(_) => lo = mid,
            Shot::High(_) => hi = mid,
        }
    }
    let (miss, slope) = best;
    if !(miss <= 0.5 * cfg.tail_cut) {
        return Err(Error::Numeric(format!(
            "shooting could not land within {} of the right vacuum (best miss {miss})",
            0.5 * cfg.tail_cut
        )));
    }

    let (mut alpha, mut dalpha) = shooter.trajectory(slope)?;
    if m > n {
        for (a, d) in alpha.iter_mut().zip(dalpha.iter_mut()) {
            *a = PI - *a;
            *d = -*d;
        }
    }
    let shift = map.vacuum_base as f64 * PI;
    for a in alpha.iter_mut() {
        *a += shift;
    }
    let profile = KinkProfile::new(
        grid.clone(),
        alpha,
        dalpha,
        *p,
        map.sign,
        map.vacuum_base,
        Provenance::BvpSecondOrder,
    )?;
    let center = profile
        .center()
        .ok_or_else(|| Error::Numeric("shooting profile never crosses its midpoint".into()))?;
    let delta = grid.midpoint() - center;
    Ok(if delta == 0.0 {
        profile
    } else {
        profile.translated(delta)
    })
}
