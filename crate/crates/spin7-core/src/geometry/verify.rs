//! Structure-equation verification: closure of Phi_c, self-duality, and
//! the fibre-action multi-moment map.

use crate::error::{Error, Result};
use crate::form::{hodge_star, numeric_exterior_derivative, KForm, DIM};
use crate::rng::SplitMix64;

use super::{so3, sp1, ChartPointSO3, ChartPointSp1, StructurePack};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    So3,
    Sp1,
}

impl ChartKind {
    pub fn label(self) -> &'static str {
        match self {
            ChartKind::So3 => "so3",
            ChartKind::Sp1 => "sp1",
        }
    }
}

/// Result of sampling |coeff(d Phi_c)| over a chart.
#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub chart: ChartKind,
    pub c: f64,
    pub points: usize,
    pub fd_step: f64,
    pub max_abs_coeff: f64,
}

/// Max |coeff| of the numeric d Phi_c at one SO(3)-chart point.
pub fn closure_residual_so3(p: &ChartPointSO3, fd_step: f64) -> Result<f64> {
    let x = p.coords();
    let c = p.c;
    let d =
        numeric_exterior_derivative(|y: &[f64; DIM]| so3::phi_in_coordinates(y, c), &x, fd_step)?;
    Ok(d.max_abs_coeff())
}

/// Max |coeff| of the numeric d Phi_c at one Sp(1)-chart point.
pub fn closure_residual_sp1(p: &ChartPointSp1, fd_step: f64) -> Result<f64> {
    let x = p.coords();
    let c = p.c;
    let d =
        numeric_exterior_derivative(|y: &[f64; DIM]| sp1::phi_in_coordinates(y, c), &x, fd_step)?;
    Ok(d.max_abs_coeff())
}

/// Samples `n_points` chart points and returns the largest absolute
/// coefficient of the numeric d Phi_c, taken over the chart coordinate
/// differentials. Torsion-freeness means this stays at discretization
/// level for every c >= 0.
pub fn verify_torsion_free(
    chart: ChartKind,
    c: f64,
    n_points: usize,
    fd_step: f64,
    seed: u64,
) -> Result<ClosureReport> {
    if n_points == 0 {
        return Err(Error::OutOfRange("n_points must be >= 1"));
    }
    if c < 0.0 {
        return Err(Error::OutOfRange("c must be nonnegative"));
    }
    let mut rng = SplitMix64::new(seed);
    let mut max_abs: f64 = 0.0;
    for _ in 0..n_points {
        let residual = match chart {
            ChartKind::So3 => closure_residual_so3(&ChartPointSO3::sample(&mut rng, c), fd_step)?,
            ChartKind::Sp1 => closure_residual_sp1(&ChartPointSp1::sample(&mut rng, c), fd_step)?,
        };
        max_abs = max_abs.max(residual);
    }
    Ok(ClosureReport {
        chart,
        c,
        points: n_points,
        fd_step,
        max_abs_coeff: max_abs,
    })
}

/// Relative residual of Hodge self-duality, |star Phi - Phi| / |Phi| in the
/// pack metric.
pub fn self_duality_residual(pack: &StructurePack) -> Result<f64> {
    let star = hodge_star(&pack.phi, &pack.metric, &pack.volume)?;
    let diff = star.sub(&pack.phi)?;
    Ok(diff.norm(&pack.metric)? / pack.phi.norm(&pack.metric)?)
}

/// Max |pairing - identity| between the hand-coded coframe and dual frame.
pub fn pairing_defect(pack: &StructurePack) -> Result<f64> {
    pack.pairing_defect()
}

/// Multi-moment map of the Sp(1) action on the fibres:
/// nu_c(r) = (20/3)(r^2 - 5c)(c + r^2)^{1/5} + (100/3) c^{6/5}.
/// Vanishes on the zero section and increases with r.
pub fn multi_moment_fibre(r: f64, c: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::OutOfRange("r must be nonnegative"));
    }
    if c < 0.0 {
        return Err(Error::OutOfRange("c must be nonnegative"));
    }
    let r2 = r * r;
    Ok(20.0 / 3.0 * (r2 - 5.0 * c) * (c + r2).powf(0.2) + 100.0 / 3.0 * c.powf(1.2))
}

/// One KForm sanity probe: d of a constant-coefficient field is exactly 0.
pub fn d_of_constant_probe(chart: ChartKind, c: f64, seed: u64) -> Result<f64> {
    let mut rng = SplitMix64::new(seed);
    let probe = KForm::from_terms(3, &[(&[0, 2, 5], 1.25), (&[1, 3, 4], -0.5)])?;
    let x = match chart {
        ChartKind::So3 => ChartPointSO3::sample(&mut rng, c).coords(),
        ChartKind::Sp1 => ChartPointSp1::sample(&mut rng, c).coords(),
    };
    let d = numeric_exterior_derivative(|_: &[f64; DIM]| Ok(probe.clone()), &x, 1e-5)?;
    Ok(d.max_abs_coeff())
}
