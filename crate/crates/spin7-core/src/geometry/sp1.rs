//! The chart adapted to the Sp(1) x Id_1 action on the base S^4.
//!
//! Coordinates, in index order: (alpha, g1, g2, g3, a0, a1, a2, a3), where
//! alpha in (-pi/2, pi/2) is the latitude, (g1, g2, g3) are Euler angles on
//! the S^3 orbits and (a0..a3) are the linear fibre coordinates. The basis
//! coframe is (d alpha, sigma1, sigma2, sigma3, xi0, xi1, xi2, xi3) with
//! the left-invariant orbit coframe normalized by d sigma_i = 2 sigma_j ^
//! sigma_k, realized as
//!   sigma1 = (d g1 + cos g2 d g3)/2,
//!   sigma2 = (cos g1 d g2 + sin g1 sin g2 d g3)/2,
//!   sigma3 = (sin g1 d g2 - cos g1 sin g2 d g3)/2,
//! and the vertical forms xi_i built from rho_i = l sigma_i,
//! l = (sin alpha - 1)/2.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{
    coordinate_images, diagonal_metric, rows_to_one_forms, rows_to_vectors, RawStructure,
    StructurePack,
};
use crate::error::{Error, Result};
use crate::form::{KForm, DIM};
use crate::rng::SplitMix64;

// coordinate indices
const CA: usize = 0;
const CG1: usize = 1;
const CG2: usize = 2;
const CG3: usize = 3;
const CA0: usize = 4;

pub const BASIS_NAMES: [&str; DIM] = [
    "dalpha", "sigma1", "sigma2", "sigma3", "xi0", "xi1", "xi2", "xi3",
];

/// A point of the Sp(1) chart with its scale parameter c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPointSp1 {
    pub alpha: f64,
    /// Euler-style orbit coordinates (g1, g2, g3); g2 must avoid 0 and pi.
    pub gamma: [f64; 3],
    /// Linear fibre coordinates, not all zero.
    pub a: [f64; 4],
    pub c: f64,
}

impl ChartPointSp1 {
    pub fn new(alpha: f64, gamma: [f64; 3], a: [f64; 4], c: f64) -> Result<Self> {
        let p = ChartPointSp1 { alpha, gamma, a, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fin = self.alpha.is_finite()
            && self.gamma.iter().all(|v| v.is_finite())
            && self.a.iter().all(|v| v.is_finite())
            && self.c.is_finite();
        if !fin {
            return Err(Error::OutOfChart("non-finite coordinate"));
        }
        if !(self.alpha > -FRAC_PI_2 && self.alpha < FRAC_PI_2) {
            return Err(Error::OutOfChart("alpha outside (-pi/2, pi/2)"));
        }
        if !(self.gamma[1] > 0.0 && self.gamma[1] < PI) {
            return Err(Error::OutOfChart("orbit coordinate g2 outside (0, pi)"));
        }
        if self.r2() <= 0.0 {
            return Err(Error::OutOfChart("fibre coordinates all zero"));
        }
        if self.c < 0.0 {
            return Err(Error::OutOfRange("c must be nonnegative"));
        }
        Ok(())
    }

    pub fn coords(&self) -> [f64; DIM] {
        [
            self.alpha,
            self.gamma[0],
            self.gamma[1],
            self.gamma[2],
            self.a[0],
            self.a[1],
            self.a[2],
            self.a[3],
        ]
    }

    pub fn from_coords(x: &[f64; DIM], c: f64) -> Self {
        ChartPointSp1 {
            alpha: x[CA],
            gamma: [x[CG1], x[CG2], x[CG3]],
            a: [x[CA0], x[CA0 + 1], x[CA0 + 2], x[CA0 + 3]],
            c,
        }
    }

    pub fn r2(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum()
    }

    /// l = (sin alpha - 1)/2, the connection coefficient of this chart.
    pub fn l(&self) -> f64 {
        (self.alpha.sin() - 1.0) / 2.0
    }

    /// Uniform sample away from the degenerate loci; r is kept in
    /// [0.3, 1.6] so the c = 0 cone stays well-conditioned.
    pub fn sample(rng: &mut SplitMix64, c: f64) -> Self {
        let margin = 0.12;
        loop {
            let a = [
                rng.symmetric(),
                rng.symmetric(),
                rng.symmetric(),
                rng.symmetric(),
            ];
            let r2: f64 = a.iter().map(|v| v * v).sum();
            if !(0.09..=2.56).contains(&r2) {
                continue;
            }
            return ChartPointSp1 {
                alpha: rng.uniform(-FRAC_PI_2 + margin, FRAC_PI_2 - margin),
                gamma: [
                    rng.uniform(0.0, 4.0 * PI),
                    rng.uniform(2.0 * margin, PI - 2.0 * margin),
                    rng.uniform(0.0, 2.0 * PI),
                ],
                a,
                c,
            };
        }
    }
}

fn sigma_rows(x: &[f64; DIM]) -> [[f64; DIM]; 3] {
    let (g1, g2) = (x[CG1], x[CG2]);
    let mut s1 = [0.0; DIM];
    s1[CG1] = 0.5;
    s1[CG3] = g2.cos() / 2.0;
    let mut s2 = [0.0; DIM];
    s2[CG2] = g1.cos() / 2.0;
    s2[CG3] = g1.sin() * g2.sin() / 2.0;
    let mut s3 = [0.0; DIM];
    s3[CG2] = g1.sin() / 2.0;
    s3[CG3] = -g1.cos() * g2.sin() / 2.0;
    [s1, s2, s3]
}

/// xi_i over coordinate differentials, from rho_i = l sigma_i:
///   xi0 = da0 + l(a1 s1 + a2 s2 + a3 s3),
///   xi1 = da1 + l(-a0 s1 - a2 s3 + a3 s2),
///   xi2 = da2 + l(-a0 s2 + a1 s3 - a3 s1),
///   xi3 = da3 + l(-a0 s3 - a1 s2 + a2 s1).
fn xi_rows(x: &[f64; DIM]) -> [[f64; DIM]; 4] {
    let l = (x[CA].sin() - 1.0) / 2.0;
    let a = [x[CA0], x[CA0 + 1], x[CA0 + 2], x[CA0 + 3]];
    let sg = sigma_rows(x);
    let table: [[(usize, usize, f64); 3]; 4] = [
        [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
        [(0, 0, -1.0), (2, 2, -1.0), (1, 3, 1.0)],
        [(1, 0, -1.0), (2, 1, 1.0), (0, 3, -1.0)],
        [(2, 0, -1.0), (1, 1, -1.0), (0, 2, 1.0)],
    ];
    let mut xi = [[0.0; DIM]; 4];
    for (i, combo) in table.iter().enumerate() {
        xi[i][CA0 + i] = 1.0;
        for &(si, ai, sign) in combo {
            for k in 0..DIM {
                xi[i][k] += sign * l * a[ai] * sg[si][k];
            }
        }
    }
    xi
}

pub(crate) fn raw_structure(x: &[f64; DIM], c: f64) -> RawStructure {
    let ca = x[CA].cos();
    let sg = sigma_rows(x);
    let l = (x[CA].sin() - 1.0) / 2.0;
    let mut b0 = [0.0; DIM];
    b0[CA] = 1.0;
    let b = [
        KForm::one_form(&b0),
        KForm::one_form(&sg[0].map(|v| ca * v)),
        KForm::one_form(&sg[1].map(|v| ca * v)),
        KForm::one_form(&sg[2].map(|v| ca * v)),
    ];
    let xi = xi_rows(x).map(|row| KForm::one_form(&row));
    let rho = sg.map(|row| KForm::one_form(&row.map(|v| l * v)));
    RawStructure {
        b,
        xi,
        rho,
        r2: x[CA0..].iter().map(|v| v * v).sum(),
        c,
    }
}

/// Phi_c over the chart coordinate differentials.
pub fn phi_in_coordinates(x: &[f64; DIM], c: f64) -> Result<KForm> {
    raw_structure(x, c).phi()
}

pub fn coframe_rows(x: &[f64; DIM]) -> [[f64; DIM]; DIM] {
    let sg = sigma_rows(x);
    let xi = xi_rows(x);
    let mut rows = [[0.0; DIM]; DIM];
    rows[0][CA] = 1.0;
    rows[1] = sg[0];
    rows[2] = sg[1];
    rows[3] = sg[2];
    rows[4] = xi[0];
    rows[5] = xi[1];
    rows[6] = xi[2];
    rows[7] = xi[3];
    rows
}

/// Duals of the halved sigma coframe on the orbit directions: the
/// generators of the SU(2) action in this trivialization (the action
/// leaves the fibre coordinates fixed).
pub fn orbit_generator_rows(x: &[f64; DIM]) -> [[f64; DIM]; 3] {
    let (g1, g2) = (x[CG1], x[CG2]);
    let (s1, c1) = (g1.sin(), g1.cos());
    let (s2, c2) = (g2.sin(), g2.cos());
    let mut d1 = [0.0; DIM];
    d1[CG1] = 2.0;
    let mut d2 = [0.0; DIM];
    d2[CG2] = 2.0 * c1;
    d2[CG3] = 2.0 * s1 / s2;
    d2[CG1] = -2.0 * s1 * c2 / s2;
    let mut d3 = [0.0; DIM];
    d3[CG2] = 2.0 * s1;
    d3[CG3] = -2.0 * c1 / s2;
    d3[CG1] = 2.0 * c1 * c2 / s2;
    [d1, d2, d3]
}

/// The orbit generators as tangent vectors over coordinate partials.
pub fn orbit_generators(x: &[f64; DIM]) -> [crate::form::TangentVector; 3] {
    orbit_generator_rows(x).map(crate::form::TangentVector::new)
}

/// Dual frame over coordinate partials, hand-coded:
/// e_alpha = d_alpha, e_i = d_i + l(...) d_a, e_{xi_i} = d_{a_i}.
pub fn frame_rows(x: &[f64; DIM]) -> [[f64; DIM]; DIM] {
    let l = (x[CA].sin() - 1.0) / 2.0;
    let a = [x[CA0], x[CA0 + 1], x[CA0 + 2], x[CA0 + 3]];
    let [d1, d2, d3] = orbit_generator_rows(x);

    let mut rows = [[0.0; DIM]; DIM];
    rows[0][CA] = 1.0;
    // e_i = d_i + l * (linear action on the fibre)
    let action: [[f64; 4]; 3] = [
        [-a[1], a[0], a[3], -a[2]],
        [-a[2], -a[3], a[0], a[1]],
        [-a[3], a[2], -a[1], a[0]],
    ];
    for (i, d) in [d1, d2, d3].into_iter().enumerate() {
        rows[1 + i] = d;
        for k in 0..4 {
            rows[1 + i][CA0 + k] += l * action[i][k];
        }
    }
    for i in 0..4 {
        rows[4 + i][CA0 + i] = 1.0;
    }
    rows
}

/// Metric coefficients: diag(5u^{3/5}, 5u^{3/5}cos^2 a x3, 4u^{-2/5} x4).
pub fn gram(x: &[f64; DIM], c: f64) -> [f64; DIM] {
    let r2: f64 = x[CA0..].iter().map(|v| v * v).sum();
    let u = c + r2;
    let f5 = 5.0 * u.powf(0.6);
    let g4 = 4.0 * u.powf(-0.4);
    let ca2 = x[CA].cos().powi(2);
    [f5, f5 * ca2, f5 * ca2, f5 * ca2, g4, g4, g4, g4]
}

/// Builds the full structure pack at a chart point.
pub fn build_sp1_pack(p: &ChartPointSp1) -> Result<StructurePack> {
    p.validate()?;
    let x = p.coords();
    let raw = raw_structure(&x, p.c);
    let rows = coframe_rows(&x);
    let images = coordinate_images(&rows)?;

    let phi = raw.phi()?.substitute(&images)?;
    let volume = raw.volume()?.substitute(&images)?;
    let omega_raw = raw.omega_cap()?;
    let a_raw = raw.a_cap()?;
    let sub3 = |fs: &[KForm; 3]| -> Result<[KForm; 3]> {
        Ok([
            fs[0].substitute(&images)?,
            fs[1].substitute(&images)?,
            fs[2].substitute(&images)?,
        ])
    };

    Ok(StructurePack {
        names: BASIS_NAMES,
        coframe: rows_to_one_forms(&rows),
        frame: rows_to_vectors(&frame_rows(&x)),
        phi,
        metric: diagonal_metric(gram(&x, p.c))?,
        volume,
        rho: sub3(&raw.rho)?,
        xi: [
            raw.xi[0].substitute(&images)?,
            raw.xi[1].substitute(&images)?,
            raw.xi[2].substitute(&images)?,
            raw.xi[3].substitute(&images)?,
        ],
        omega_cap: sub3(&omega_raw)?,
        a_cap: sub3(&a_raw)?,
        orientation_sign: 1.0,
    })
}

/// Hand-coded Phi_c in the pack coframe, for cross-checking the generic
/// construction: 16u^{-4/5} xi0^xi1^xi2^xi3 + 25u^{6/5} cos^3 a  da^s1^s2^s3
/// + 20u^{1/5} cos a sum (xi0^xi_i - xi_j^xi_k)^(da^s_i - cos a s_j^s_k).
pub fn phi_closed_form(p: &ChartPointSp1) -> Result<KForm> {
    let u = p.c + p.r2();
    let ca = p.alpha.cos();
    let (da, s1, x0) = (0usize, 1usize, 4usize);
    let mut phi = KForm::monomial(&[x0, x0 + 1, x0 + 2, x0 + 3], 16.0 * u.powf(-0.8))?;
    phi = phi.add(&KForm::monomial(
        &[da, s1, s1 + 1, s1 + 2],
        25.0 * u.powf(1.2) * ca.powi(3),
    )?)?;
    let k = 20.0 * u.powf(0.2) * ca;
    for i in 0..3 {
        let (j, kk) = super::cyclic(i);
        let a_i = KForm::from_terms(2, &[(&[x0, x0 + i + 1], 1.0), (&[x0 + j, x0 + kk], -1.0)])?;
        let o_i = KForm::from_terms(
            2,
            &[(&[da, s1 + i], 1.0), (&[s1 + j - 1, s1 + kk - 1], -ca)],
        )?;
        phi = phi.add(&a_i.wedge(&o_i)?.scale(k))?;
    }
    Ok(phi)
}

/// Numeric exterior derivative of a form field over this chart's
/// coordinates.
pub fn exterior_derivative_sp1<F>(field: F, at: &ChartPointSp1, step: f64) -> Result<KForm>
where
    F: Fn(&ChartPointSp1) -> Result<KForm>,
{
    at.validate()?;
    let x0 = at.coords();
    let reach = step
        * x0.map(|v| v.abs().max(1.0))
            .iter()
            .fold(0.0f64, |m, &v| m.max(v));
    if at.alpha.abs() + reach >= FRAC_PI_2 {
        return Err(Error::OutOfChart("finite-difference stencil leaves chart"));
    }
    let c = at.c;
    crate::form::numeric_exterior_derivative(
        |x: &[f64; DIM]| field(&ChartPointSp1::from_coords(x, c)),
        &x0,
        step,
    )
}
