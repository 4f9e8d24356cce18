//! Root bracketing and fitting helpers shared across the fibration modules.

use crate::error::{Error, Result};

/// Bisection on a bracketing interval [lo, hi] with f(lo) and f(hi) of
/// opposite sign. Runs until the interval is below `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence("bisection bracket has equal signs"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Log-log power-law fit y ~ C x^p over strictly positive samples.
/// Returns (C, p).
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::OutOfRange("log-log fit needs >= 2 samples"));
    }
    if xs.iter().chain(ys.iter()).any(|&v| v <= 0.0) {
        return Err(Error::OutOfRange("log-log fit needs positive samples"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (intercept, slope) = crate::linalg::line_fit(&lx, &ly);
    Ok((intercept.exp(), slope))
}
