//! Dormand-Prince 5(4) with embedded error control.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Adaptive integrator state carried across consecutive output points.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    rel_tol: f64,
    abs_tol: f64,
    max_steps: usize,
    steps: usize,
    h: f64,
}

impl Dopri5 {
    pub fn new(rel_tol: f64, abs_tol: f64, max_steps: usize, initial_step: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_steps,
            steps: 0,
            h: initial_step.abs(),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Integrates `y' = f(x, y)` from `x` to `x_end` (either direction),
    /// landing exactly on `x_end`.
    pub fn advance<const N: usize, F>(
        &mut self,
        f: &mut F,
        x: f64,
        y: [f64; N],
        x_end: f64,
    ) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let span = x_end - x;
        if span == 0.0 {
            return Ok(y);
        }
        let dir = span.signum();
        let mut x = x;
        let mut y = y;
        loop {
            let remaining = (x_end - x) * dir;
            if remaining <= 0.0 {
                return Ok(y);
            }
            if self.steps >= self.max_steps {
                return Err(Error::Numeric(format!(
                    "step limit {} reached at x = {x}, state {y:?}",
                    self.max_steps
                )));
            }
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h } * dir;

            let k1 = f(x, &y);
            let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                x + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                x + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                x + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(x + h, &y_new);
            self.steps += 1;

            let mut err: f64 = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / scale).abs());
            }
            if !err.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite error estimate at x = {x}"
                )));
            }
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err <= 1.0 {
                x = if last { x_end } else { x + h };
                y = y_new;
                // keep the pre-clamp step when the last step was shortened to hit x_end
                if !last {
                    self.h = h.abs() * factor;
                } else {
                    self.h = self.h.max(h.abs() * factor);
                }
            } else {
                self.h = h.abs() * factor;
            }
            if self.h < 1e-14 * x.abs().max(1.0) {
                return Err(Error::Numeric(format!("step size underflow at x = {x}")));
            }
        }
    }
}
