use std::f64::consts::{FRAC_PI_2, PI};

use super::rk::Dopri5;
use super::{Grid, KinkProfile, Provenance, SolverConfig};
use crate::closed_form::branch_map;
use crate::error::{Error, Result};
use crate::model::{bps_slope, KinkSign, ModelParams};

/// Integrates the first-order equation outward from `alpha(x0) = pi/2` in both
/// directions, landing on every grid point.
///
/// `Minus` yields the increasing kink from `0` to `pi`, `Plus` the decreasing
/// antikink from `pi` to `0`.
pub fn integrate_bps(
    p: &ModelParams,
    x0: f64,
    sign: KinkSign,
    cfg: &SolverConfig,
    grid: &Grid,
) -> Result<KinkProfile> {
    cfg.validate()?;
    if !(x0 >= grid.x_min() && x0 <= grid.x_max()) {
        return Err(Error::Domain(format!(
            "grid [{}, {}] does not span x0 = {x0}",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let xs = grid.points();
    let n = xs.len();
    let mut alpha = vec![0.0; n];
    let split = xs.partition_point(|&x| x < x0);
    let mut rhs = |_x: f64, y: &[f64; 1]| [bps_slope(y[0], sign, p)];
    let h0 = 0.01 * p.big_l();

    let mut rk = Dopri5::new(cfg.rel_tol, cfg.abs_tol, cfg.max_steps, h0);
    let (mut x, mut y) = (x0, [FRAC_PI_2]);
    for i in split..n {
        y = rk.advance(&mut rhs, x, y, xs[i])?;
        x = xs[i];
        alpha[i] = y[0];
    }
    let mut rk = Dopri5::new(cfg.rel_tol, cfg.abs_tol, cfg.max_steps, h0);
    let (mut x, mut y) = (x0, [FRAC_PI_2]);
    for i in (0..split).rev() {
        y = rk.advance(&mut rhs, x, y, xs[i])?;
        x = xs[i];
        alpha[i] = y[0];
    }
    let dalpha = alpha.iter().map(|&a| bps_slope(a, sign, p)).collect();
    KinkProfile::new(
        grid.clone(),
        alpha,
        dalpha,
        *p,
        sign,
        0,
        Provenance::OdeFirstOrder,
    )
}

/// First-order integration for the kink joining `m pi` at the left to `n pi`
/// at the right, centered on `x0`. `m == n` gives the vacuum.
pub fn integrate_bps_branch(
    p: &ModelParams,
    x0: f64,
    boundary: (i64, i64),
    cfg: &SolverConfig,
    grid: &Grid,
) -> Result<KinkProfile> {
    let (m, n) = boundary;
    if m == n {
        cfg.validate()?;
        return Ok(KinkProfile::vacuum(
            *p,
            m,
            grid.clone(),
            Provenance::OdeFirstOrder,
        ));
    }
    let map = branch_map(m, n);
    if !map.valid {
        return Err(Error::NonAdjacentVacua { m, n });
    }
    let direction = if m < n {
        KinkSign::Minus
    } else {
        KinkSign::Plus
    };
    let mut profile = integrate_bps(p, x0, direction, cfg, grid)?;
    let shift = map.vacuum_base as f64 * PI;
    profile.alpha.iter_mut().for_each(|a| *a += shift);
    profile.sign = map.sign;
    profile.vacuum_base = map.vacuum_base;
    Ok(profile)
}
