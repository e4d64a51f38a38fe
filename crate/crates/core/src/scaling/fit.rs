use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `value ≈ amplitude · N^(-exponent)` by least squares in ln-ln space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub stderr_exponent: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

impl PowerLawFit {
    /// `(ln N, ln value)` pairs.
    pub fn log_points(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(n, v)| (n.ln(), v.ln())).collect()
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    for &(n, v) in points {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Fit(format!("size {n} is not positive")));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Fit(format!("value {v:e} at N = {n} is not positive")));
        }
    }
    let m = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(n, v)| (n.ln(), v.ln())).unzip();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let sst: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    Ok(PowerLawFit {
        exponent: -slope,
        amplitude: intercept.exp(),
        stderr_exponent: (ssr / (m - 2.0) / sxx).sqrt(),
        r_squared,
        points: points.to_vec(),
    })
}

/// `a / b` with first-order error propagation for independent errors.
pub fn ratio_with_error(a: f64, sa: f64, b: f64, sb: f64) -> (f64, f64) {
    let r = a / b;
    let s = ((sa / b).powi(2) + (a * sb / (b * b)).powi(2)).sqrt();
    (r, s)
}
