//! Incomplete beta evaluation used by the level-set primitive H.
//!
//! H(alpha) = int_0^alpha (sin cos)^{3/2} = (1/2) B(sin^2 alpha; 5/4, 5/4),
//! so a single continued fraction with a = b = 5/4 covers everything. The
//! complete value follows from the symmetry B(1/2; a, a) = B(a, a)/2, which
//! avoids any gamma-function dependency.

use crate::error::{Error, Result};

const A: f64 = 1.25;
const B: f64 = 1.25;
const MAX_ITER: usize = 300;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Continued fraction for the regularized incomplete beta (Lentz's method),
/// valid for x < (a+1)/(a+b+2).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Unregularized incomplete beta B(x; 5/4, 5/4) for x in [0, 1].
pub fn incomplete_beta_5454(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange("incomplete beta argument"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(complete_beta_5454());
    }
    if x <= 0.5 {
        Ok(x.powf(A) * (1.0 - x).powf(B) / A * betacf(A, B, x))
    } else {
        // symmetry of a = b: B(x) = B(1) - B(1-x)
        Ok(complete_beta_5454() - incomplete_beta_5454(1.0 - x)?)
    }
}

/// B(5/4, 5/4) = 2 B(1/2; 5/4, 5/4) by symmetry of the integrand.
pub fn complete_beta_5454() -> f64 {
    let x = 0.5f64;
    2.0 * (x.powf(A) * (1.0 - x).powf(B) / A * betacf(A, B, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert_eq!(incomplete_beta_5454(0.0).unwrap(), 0.0);
        let full = incomplete_beta_5454(1.0).unwrap();
        assert!((full - complete_beta_5454()).abs() < 1e-15);
    }

    #[test]
    fn symmetry_about_one_half() {
        for &x in &[0.1, 0.25, 0.4, 0.5] {
            let lo = incomplete_beta_5454(x).unwrap();
            let hi = incomplete_beta_5454(1.0 - x).unwrap();
            assert!((lo + hi - complete_beta_5454()).abs() < 1e-14);
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(incomplete_beta_5454(-0.1).is_err());
        assert!(incomplete_beta_5454(1.1).is_err());
    }
}
