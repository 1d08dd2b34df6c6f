use super::KinkProfile;
use crate::error::{Error, Result};

/// Second derivative of uniformly spaced samples: fourth-order central
/// differences inside, five-point one-sided stencils at the two outermost
/// points on each side.
pub fn second_derivative(values: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 5 {
        return Err(Error::Domain(format!(
            "need at least 5 samples for second differences, got {n}"
        )));
    }
    let f = values;
    let denom = 12.0 * h * h;
    let mut out = vec![0.0; n];
    out[0] = (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]) / denom;
    out[1] = (11.0 * f[0] - 20.0 * f[1] + 6.0 * f[2] + 4.0 * f[3] - f[4]) / denom;
    for i in 2..n - 2 {
        out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / denom;
    }
    out[n - 2] =
        (11.0 * f[n - 1] - 20.0 * f[n - 2] + 6.0 * f[n - 3] + 4.0 * f[n - 4] - f[n - 5]) / denom;
    out[n - 1] = (35.0 * f[n - 1] - 104.0 * f[n - 2] + 114.0 * f[n - 3] - 56.0 * f[n - 4]
        + 11.0 * f[n - 5])
        / denom;
    Ok(out)
}

/// `alpha''` samples of a profile on a uniform grid.
pub fn differentiate(profile: &KinkProfile) -> Result<Vec<f64>> {
    if profile.len() < 5 {
        return Err(Error::Domain(format!(
            "profile has {} points, need at least 5",
            profile.len()
        )));
    }
    let h = profile
        .grid
        .uniform_step(1e-12)
        .ok_or_else(|| Error::Domain("grid spacing is not uniform".into()))?;
    second_derivative(&profile.alpha, h)
}
