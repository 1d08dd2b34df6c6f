//! Adaptive Gauss-Kronrod (7/15) quadrature and a sampled trapezoid rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod nodes in [0, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::Numeric(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]` until the estimated error is below
/// `max(abs_tol, rel_tol |I|)`.
pub fn quadrature<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    let first = gk15(&mut f, a, b)?;
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "quadrature did not converge on [{a}, {b}]: estimate {total}, error {err}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Numeric(format!(
                "quadrature interval [{}, {}] cannot be split further",
                worst.a, worst.b
            )));
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    Ok(heap.iter().map(|p| p.value).sum())
}

/// Trapezoid rule over (possibly non-uniform) samples.
///
/// For integrands that decay exponentially towards both ends of a uniform
/// grid the rule converges spectrally, which is the situation for every kink
/// density in this crate.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_over_half_period() {
        let v = quadrature(f64::sin, 0.0, PI, 1e-14, 1e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn square() {
        let v = quadrature(|x| x * x, 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_needs_subdivision() {
        // int 1/(1e-4 + x^2) over [-1, 1] = 2 atan(100)/1e-2
        let v = quadrature(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12).unwrap();
        let exact = 2.0 * 100f64.atan() / 1e-2;
        assert!(((v - exact) / exact).abs() < 1e-11);
    }

    #[test]
    fn rejects_bad_interval_and_nan() {
        assert!(quadrature(f64::sin, 1.0, 0.0, 1e-10, 1e-10).is_err());
        assert!(quadrature(|_| f64::NAN, 0.0, 1.0, 1e-10, 1e-10).is_err());
    }

    #[test]
    fn trapezoid_is_spectral_for_sech_squared() {
        let n = 801;
        let xs: Vec<f64> = (0..n)
            .map(|i| -20.0 + 40.0 * i as f64 / (n - 1) as f64)
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / x.cosh().powi(2)).collect();
        assert!((trapezoid(&xs, &ys) - 2.0).abs() < 1e-13);
    }
}
