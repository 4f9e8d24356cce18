//! The chart adapted to the SO(3) x Id_2 action on the base S^4.
//!
//! Coordinates, in index order: (alpha, beta, theta, phi, gamma, s, t, delta).
//! The base sphere carries the orthonormal coframe
//!   b0 = d alpha, b1 = sin(alpha) d beta, b2 = cos(alpha) d theta,
//!   b3 = cos(alpha) sin(theta) d phi,
//! the orbits of the lifted SU(2) action carry the left-invariant coframe
//!   sigma1 = d gamma + cos(theta) d phi,
//!   sigma2 = cos(gamma) d theta + sin(gamma) sin(theta) d phi,
//!   sigma3 = sin(gamma) d theta - cos(gamma) sin(theta) d phi,
//! and the fibre polar coordinates (s, t, delta, gamma) parametrize
//!   a0 = s cos((delta-gamma)/2), a1 = s sin((delta-gamma)/2),
//!   a2 = t cos((delta+gamma)/2), a3 = t sin((delta+gamma)/2).
//!
//! Two coframes of the chart are exposed: the adapted one
//! (sigma1, sigma2, sigma3, d alpha, d beta, ds, dt, d delta) and the
//! metric-diagonalizing one
//! (d alpha, d beta, sigma2, sigma3, ds~, dt~, omega1, omega2), where
//!   ds~ = ds + (t sin(alpha)/2) sigma2,  dt~ = dt - (s sin(alpha)/2) sigma2,
//!   omega1 = s d delta + s cos(alpha) d beta - s sigma1 + t sin(alpha) sigma3,
//!   omega2 = t d delta - t cos(alpha) d beta + t sigma1 + s sin(alpha) sigma3.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{
    coordinate_images, cyclic, rows_to_one_forms, rows_to_vectors, RawStructure, StructurePack,
};
use crate::error::{Error, Result};
use crate::form::{KForm, MetricAtPoint, DIM};
use crate::rng::SplitMix64;

// coordinate indices
const CA: usize = 0; // alpha
const CB: usize = 1; // beta
const CTH: usize = 2; // theta
const CPH: usize = 3; // phi
const CG: usize = 4; // gamma
const CS: usize = 5; // s
const CT: usize = 6; // t
const CD: usize = 7; // delta

/// Distance kept from the chart-degenerating loci when sampling.
pub const SAMPLE_MARGIN: f64 = 0.12;

/// Which coframe a pack is built in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum So3Basis {
    /// (sigma1, sigma2, sigma3, d alpha, d beta, ds, dt, d delta)
    Adapted,
    /// (d alpha, d beta, sigma2, sigma3, ds~, dt~, omega1, omega2)
    Diagonalizing,
}

pub const ADAPTED_NAMES: [&str; DIM] = [
    "sigma1", "sigma2", "sigma3", "dalpha", "dbeta", "ds", "dt", "ddelta",
];
pub const DIAGONALIZING_NAMES: [&str; DIM] = [
    "dalpha", "dbeta", "sigma2", "sigma3", "ds_tilde", "dt_tilde", "omega1", "omega2",
];

/// A point of the SO(3) chart with its scale parameter c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPointSO3 {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
    pub s: f64,
    pub t: f64,
    pub delta: f64,
    pub gamma: f64,
    pub c: f64,
}

impl ChartPointSO3 {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        beta: f64,
        theta: f64,
        phi: f64,
        s: f64,
        t: f64,
        delta: f64,
        gamma: f64,
        c: f64,
    ) -> Result<Self> {
        let p = ChartPointSO3 {
            alpha,
            beta,
            theta,
            phi,
            s,
            t,
            delta,
            gamma,
            c,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fin = [
            self.alpha, self.beta, self.theta, self.phi, self.s, self.t, self.delta, self.gamma,
            self.c,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !fin {
            return Err(Error::OutOfChart("non-finite coordinate"));
        }
        if !(self.alpha > 0.0 && self.alpha < FRAC_PI_2) {
            return Err(Error::OutOfChart("alpha outside (0, pi/2)"));
        }
        if !(self.theta > 0.0 && self.theta < PI) {
            return Err(Error::OutOfChart("theta outside (0, pi)"));
        }
        if self.s <= 0.0 || self.t <= 0.0 {
            return Err(Error::OutOfChart("s, t must be positive"));
        }
        if self.c < 0.0 {
            return Err(Error::OutOfRange("c must be nonnegative"));
        }
        Ok(())
    }

    pub fn coords(&self) -> [f64; DIM] {
        [
            self.alpha, self.beta, self.theta, self.phi, self.gamma, self.s, self.t, self.delta,
        ]
    }

    pub fn from_coords(x: &[f64; DIM], c: f64) -> Self {
        ChartPointSO3 {
            alpha: x[CA],
            beta: x[CB],
            theta: x[CTH],
            phi: x[CPH],
            gamma: x[CG],
            s: x[CS],
            t: x[CT],
            delta: x[CD],
            c,
        }
    }

    pub fn r2(&self) -> f64 {
        self.s * self.s + self.t * self.t
    }

    /// Uniform sample away from the degenerate loci.
    pub fn sample(rng: &mut SplitMix64, c: f64) -> Self {
        ChartPointSO3 {
            alpha: rng.uniform(SAMPLE_MARGIN, FRAC_PI_2 - SAMPLE_MARGIN),
            beta: rng.uniform(0.0, 2.0 * PI),
            theta: rng.uniform(2.0 * SAMPLE_MARGIN, PI - 2.0 * SAMPLE_MARGIN),
            phi: rng.uniform(0.0, 2.0 * PI),
            s: rng.uniform(0.15, 1.2),
            t: rng.uniform(0.15, 1.2),
            delta: rng.uniform(0.0, 2.0 * PI),
            gamma: rng.uniform(0.0, 4.0 * PI),
            c,
        }
    }
}

fn sigma_rows(x: &[f64; DIM]) -> [[f64; DIM]; 3] {
    let (theta, gamma) = (x[CTH], x[CG]);
    let mut s1 = [0.0; DIM];
    s1[CG] = 1.0;
    s1[CPH] = theta.cos();
    let mut s2 = [0.0; DIM];
    s2[CTH] = gamma.cos();
    s2[CPH] = gamma.sin() * theta.sin();
    let mut s3 = [0.0; DIM];
    s3[CTH] = gamma.sin();
    s3[CPH] = -gamma.cos() * theta.sin();
    [s1, s2, s3]
}

fn b_rows(x: &[f64; DIM]) -> [[f64; DIM]; 4] {
    let (alpha, theta) = (x[CA], x[CTH]);
    let mut b0 = [0.0; DIM];
    b0[CA] = 1.0;
    let mut b1 = [0.0; DIM];
    b1[CB] = alpha.sin();
    let mut b2 = [0.0; DIM];
    b2[CTH] = alpha.cos();
    let mut b3 = [0.0; DIM];
    b3[CPH] = alpha.cos() * theta.sin();
    [b0, b1, b2, b3]
}

/// 2 rho_1 = -cos(alpha) d beta + cos(theta) d phi,
/// 2 rho_2 = sin(alpha) d theta, 2 rho_3 = sin(alpha) sin(theta) d phi.
fn rho_rows(x: &[f64; DIM]) -> [[f64; DIM]; 3] {
    let (alpha, theta) = (x[CA], x[CTH]);
    let mut r1 = [0.0; DIM];
    r1[CB] = -alpha.cos() / 2.0;
    r1[CPH] = theta.cos() / 2.0;
    let mut r2 = [0.0; DIM];
    r2[CTH] = alpha.sin() / 2.0;
    let mut r3 = [0.0; DIM];
    r3[CPH] = alpha.sin() * theta.sin() / 2.0;
    [r1, r2, r3]
}

/// Linear fibre coordinates a_i of the point.
pub fn a_values(x: &[f64; DIM]) -> [f64; 4] {
    let (s, t, delta, gamma) = (x[CS], x[CT], x[CD], x[CG]);
    let hm = (delta - gamma) / 2.0;
    let hp = (delta + gamma) / 2.0;
    [s * hm.cos(), s * hm.sin(), t * hp.cos(), t * hp.sin()]
}

fn da_rows(x: &[f64; DIM]) -> [[f64; DIM]; 4] {
    let (s, t, delta, gamma) = (x[CS], x[CT], x[CD], x[CG]);
    let hm = (delta - gamma) / 2.0;
    let hp = (delta + gamma) / 2.0;
    let mut da0 = [0.0; DIM];
    da0[CS] = hm.cos();
    da0[CD] = -s * hm.sin() / 2.0;
    da0[CG] = s * hm.sin() / 2.0;
    let mut da1 = [0.0; DIM];
    da1[CS] = hm.sin();
    da1[CD] = s * hm.cos() / 2.0;
    da1[CG] = -s * hm.cos() / 2.0;
    let mut da2 = [0.0; DIM];
    da2[CT] = hp.cos();
    da2[CD] = -t * hp.sin() / 2.0;
    da2[CG] = -t * hp.sin() / 2.0;
    let mut da3 = [0.0; DIM];
    da3[CT] = hp.sin();
    da3[CD] = t * hp.cos() / 2.0;
    da3[CG] = t * hp.cos() / 2.0;
    [da0, da1, da2, da3]
}

/// Vertical 1-forms over coordinate differentials:
///   xi0 = da0 + rho1 a1 + rho2 a2 + rho3 a3,
///   xi1 = da1 - rho1 a0 - rho3 a2 + rho2 a3,
///   xi2 = da2 - rho2 a0 + rho3 a1 - rho1 a3,
///   xi3 = da3 - rho3 a0 - rho2 a1 + rho1 a2.
fn xi_rows(x: &[f64; DIM]) -> [[f64; DIM]; 4] {
    let a = a_values(x);
    let rho = rho_rows(x);
    let da = da_rows(x);
    let mut xi = [[0.0; DIM]; 4];
    // (xi index, [(rho index, a index, sign); 3])
    let table: [[(usize, usize, f64); 3]; 4] = [
        [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
        [(0, 0, -1.0), (2, 2, -1.0), (1, 3, 1.0)],
        [(1, 0, -1.0), (2, 1, 1.0), (0, 3, -1.0)],
        [(2, 0, -1.0), (1, 1, -1.0), (0, 2, 1.0)],
    ];
    for (i, combo) in table.iter().enumerate() {
        xi[i] = da[i];
        for &(ri, ai, sign) in combo {
            for k in 0..DIM {
                xi[i][k] += sign * a[ai] * rho[ri][k];
            }
        }
    }
    xi
}

pub(crate) fn raw_structure(x: &[f64; DIM], c: f64) -> RawStructure {
    let b = b_rows(x).map(|row| KForm::one_form(&row));
    let xi = xi_rows(x).map(|row| KForm::one_form(&row));
    let rho = rho_rows(x).map(|row| KForm::one_form(&row));
    RawStructure {
        b,
        xi,
        rho,
        r2: x[CS] * x[CS] + x[CT] * x[CT],
        c,
    }
}

/// The vertical 1-forms xi_i over coordinate differentials.
pub fn xi_one_forms(x: &[f64; DIM]) -> [KForm; 4] {
    xi_rows(x).map(|row| KForm::one_form(&row))
}

/// The three generators of the SU(2) orbits over coordinate partials
/// (the frame dual to the sigma coframe).
pub fn orbit_generators(x: &[f64; DIM]) -> [crate::form::TangentVector; 3] {
    let rows = frame_rows(x, So3Basis::Adapted);
    [
        crate::form::TangentVector::new(rows[0]),
        crate::form::TangentVector::new(rows[1]),
        crate::form::TangentVector::new(rows[2]),
    ]
}

/// The connection 1-forms rho_i over coordinate differentials.
pub fn rho_one_forms(x: &[f64; DIM]) -> [KForm; 3] {
    rho_rows(x).map(|row| KForm::one_form(&row))
}

/// Phi_c over the chart coordinate differentials. This is the field the
/// torsion-free verification differentiates.
pub fn phi_in_coordinates(x: &[f64; DIM], c: f64) -> Result<KForm> {
    raw_structure(x, c).phi()
}

/// Basis 1-forms over coordinate differentials (coframe matrix rows).
pub fn coframe_rows(x: &[f64; DIM], basis: So3Basis) -> [[f64; DIM]; DIM] {
    let sg = sigma_rows(x);
    let (alpha, s, t) = (x[CA], x[CS], x[CT]);
    let sa = alpha.sin();
    let ca = alpha.cos();
    let mut rows = [[0.0; DIM]; DIM];
    match basis {
        So3Basis::Adapted => {
            rows[0] = sg[0];
            rows[1] = sg[1];
            rows[2] = sg[2];
            rows[3][CA] = 1.0;
            rows[4][CB] = 1.0;
            rows[5][CS] = 1.0;
            rows[6][CT] = 1.0;
            rows[7][CD] = 1.0;
        }
        So3Basis::Diagonalizing => {
            rows[0][CA] = 1.0;
            rows[1][CB] = 1.0;
            rows[2] = sg[1];
            rows[3] = sg[2];
            // ds~ = ds + (t sin a / 2) sigma2
            rows[4][CS] = 1.0;
            for k in 0..DIM {
                rows[4][k] += t * sa / 2.0 * sg[1][k];
            }
            // dt~ = dt - (s sin a / 2) sigma2
            rows[5][CT] = 1.0;
            for k in 0..DIM {
                rows[5][k] -= s * sa / 2.0 * sg[1][k];
            }
            // omega1 = s d delta + s cos a d beta - s sigma1 + t sin a sigma3
            rows[6][CD] = s;
            rows[6][CB] = s * ca;
            for k in 0..DIM {
                rows[6][k] += -s * sg[0][k] + t * sa * sg[2][k];
            }
            // omega2 = t d delta - t cos a d beta + t sigma1 + s sin a sigma3
            rows[7][CD] = t;
            rows[7][CB] = -t * ca;
            for k in 0..DIM {
                rows[7][k] += t * sg[0][k] + s * sa * sg[2][k];
            }
        }
    }
    rows
}

/// Dual frame vectors over coordinate partials, hand-coded (not obtained
/// by inverting the coframe), so pairing them against the coframe is a
/// real consistency check.
pub fn frame_rows(x: &[f64; DIM], basis: So3Basis) -> [[f64; DIM]; DIM] {
    let (alpha, theta, gamma, s, t) = (x[CA], x[CTH], x[CG], x[CS], x[CT]);
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let (st, ct) = (theta.sin(), theta.cos());
    let (sgm, cgm) = (gamma.sin(), gamma.cos());
    // duals of (sigma1, sigma2, sigma3) on the orbit directions
    let mut d1 = [0.0; DIM];
    d1[CG] = 1.0;
    let mut d2 = [0.0; DIM];
    d2[CTH] = cgm;
    d2[CPH] = sgm / st;
    d2[CG] = -sgm * ct / st;
    let mut d3 = [0.0; DIM];
    d3[CTH] = sgm;
    d3[CPH] = -cgm / st;
    d3[CG] = cgm * ct / st;

    let mut rows = [[0.0; DIM]; DIM];
    match basis {
        So3Basis::Adapted => {
            rows[0] = d1;
            rows[1] = d2;
            rows[2] = d3;
            rows[3][CA] = 1.0;
            rows[4][CB] = 1.0;
            rows[5][CS] = 1.0;
            rows[6][CT] = 1.0;
            rows[7][CD] = 1.0;
        }
        So3Basis::Diagonalizing => {
            // e_alpha, e_beta = d_beta + cos(a) d_1
            rows[0][CA] = 1.0;
            rows[1][CB] = 1.0;
            rows[1][CG] += ca;
            // e_2 = d_2 - (t sin a / 2) d_s + (s sin a / 2) d_t
            rows[2] = d2;
            rows[2][CS] -= t * sa / 2.0;
            rows[2][CT] += s * sa / 2.0;
            // e_3 = d_3 - ((s^2+t^2) sin a / 2st) d_delta + ((t^2-s^2) sin a / 2st) d_1
            rows[3] = d3;
            rows[3][CD] -= (s * s + t * t) * sa / (2.0 * s * t);
            rows[3][CG] += (t * t - s * s) * sa / (2.0 * s * t);
            // e_s, e_t
            rows[4][CS] = 1.0;
            rows[5][CT] = 1.0;
            // e_omega1 = (1/2s)(d_delta - d_1), e_omega2 = (1/2t)(d_delta + d_1)
            rows[6][CD] = 1.0 / (2.0 * s);
            rows[6][CG] = -1.0 / (2.0 * s);
            rows[7][CD] = 1.0 / (2.0 * t);
            rows[7][CG] = 1.0 / (2.0 * t);
        }
    }
    rows
}

/// Closed-form metric coefficients in the requested coframe.
pub fn gram(x: &[f64; DIM], c: f64, basis: So3Basis) -> [[f64; DIM]; DIM] {
    let (alpha, s, t) = (x[CA], x[CS], x[CT]);
    let r2 = s * s + t * t;
    let u = c + r2;
    let f5 = 5.0 * u.powf(0.6);
    let g = u.powf(-0.4);
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let mut m = [[0.0; DIM]; DIM];
    match basis {
        So3Basis::Diagonalizing => {
            m[0][0] = f5;
            m[1][1] = f5 * sa * sa;
            m[2][2] = f5 * ca * ca;
            m[3][3] = f5 * ca * ca;
            m[4][4] = 4.0 * g;
            m[5][5] = 4.0 * g;
            m[6][6] = g;
            m[7][7] = g;
        }
        So3Basis::Adapted => {
            m[0][0] = g * r2;
            m[1][1] = f5 * ca * ca + g * r2 * sa * sa;
            m[2][2] = m[1][1];
            m[3][3] = f5;
            m[4][4] = f5 * sa * sa + g * r2 * ca * ca;
            m[5][5] = 4.0 * g;
            m[6][6] = 4.0 * g;
            m[7][7] = g * r2;
            let set = |m: &mut [[f64; DIM]; DIM], i: usize, j: usize, v: f64| {
                m[i][j] = v;
                m[j][i] = v;
            };
            set(&mut m, 4, 0, -g * r2 * ca); // d beta . sigma1
            set(&mut m, 7, 0, g * (t * t - s * s)); // d delta . sigma1
            set(&mut m, 7, 2, 2.0 * g * s * t * sa); // d delta . sigma3
            set(&mut m, 5, 1, 2.0 * g * t * sa); // ds . sigma2
            set(&mut m, 6, 1, -2.0 * g * s * sa); // dt . sigma2
            set(&mut m, 7, 4, -g * (t * t - s * s) * ca); // d delta . d beta
        }
    }
    m
}

/// Builds the full structure pack at a chart point.
///
/// Forms are constructed from the bundle formulas in raw coordinates and
/// converted into the requested coframe; the metric uses the closed-form
/// coefficients (exactly diagonal in the diagonalizing coframe).
pub fn build_so3_pack(p: &ChartPointSO3, basis: So3Basis) -> Result<StructurePack> {
    p.validate()?;
    let x = p.coords();
    let raw = raw_structure(&x, p.c);
    let rows = coframe_rows(&x, basis);
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
    let rho = sub3(&raw.rho)?;
    let omega_cap = sub3(&omega_raw)?;
    let a_cap = sub3(&a_raw)?;
    let xi = [
        raw.xi[0].substitute(&images)?,
        raw.xi[1].substitute(&images)?,
        raw.xi[2].substitute(&images)?,
        raw.xi[3].substitute(&images)?,
    ];

    let metric = MetricAtPoint::new(gram(&x, p.c, basis))?;
    let (names, orientation_sign) = match basis {
        So3Basis::Adapted => (ADAPTED_NAMES, -1.0),
        So3Basis::Diagonalizing => (DIAGONALIZING_NAMES, 1.0),
    };

    Ok(StructurePack {
        names,
        coframe: rows_to_one_forms(&rows),
        frame: rows_to_vectors(&frame_rows(&x, basis)),
        phi,
        metric,
        volume,
        rho,
        xi,
        omega_cap,
        a_cap,
        orientation_sign,
    })
}

/// Hand-coded Phi_c in the diagonalizing coframe, used as the closed-form
/// cross-check of the generic construction.
pub fn phi_diagonalizing_closed_form(p: &ChartPointSO3) -> Result<KForm> {
    let u = p.c + p.r2();
    let (sa, ca) = (p.alpha.sin(), p.alpha.cos());
    // indices in the diagonalizing basis
    let (da, db, s2, s3, ds, dt, w1, w2) = (0, 1, 2, 3, 4, 5, 6, 7);
    let mut phi = KForm::monomial(&[ds, dt, w2, w1], 4.0 * u.powf(-0.8))?;
    phi = phi.add(&KForm::monomial(
        &[da, db, s3, s2],
        25.0 * u.powf(1.2) * sa * ca * ca,
    )?)?;
    let k = 10.0 * u.powf(0.2);
    // (ds~ ^ w1 - dt~ ^ w2) ^ (sin a  da ^ db + cos^2 a  s2 ^ s3)
    let pair1 = KForm::from_terms(2, &[(&[ds, w1], 1.0), (&[dt, w2], -1.0)])?;
    let base1 = KForm::from_terms(2, &[(&[da, db], sa), (&[s2, s3], ca * ca)])?;
    phi = phi.add(&pair1.wedge(&base1)?.scale(k))?;
    // (1/2)(4 ds~ ^ dt~ + w1 ^ w2) ^ cos a (da ^ s2 - sin a db ^ s3)
    let pair2 = KForm::from_terms(2, &[(&[ds, dt], 2.0), (&[w1, w2], 0.5)])?;
    let base2 = KForm::from_terms(2, &[(&[da, s2], ca), (&[db, s3], -ca * sa)])?;
    phi = phi.add(&pair2.wedge(&base2)?.scale(k))?;
    // (ds~ ^ w2 + dt~ ^ w1) ^ cos a (-da ^ s3 - sin a db ^ s2)
    let pair3 = KForm::from_terms(2, &[(&[ds, w2], 1.0), (&[dt, w1], 1.0)])?;
    let base3 = KForm::from_terms(2, &[(&[da, s3], -ca), (&[db, s2], -ca * sa)])?;
    phi = phi.add(&pair3.wedge(&base3)?.scale(k))?;
    Ok(phi)
}

/// Numeric exterior derivative of a form field given over the chart's
/// coordinate differentials. The whole finite-difference stencil must stay
/// inside the chart.
pub fn exterior_derivative_so3<F>(field: F, at: &ChartPointSO3, step: f64) -> Result<KForm>
where
    F: Fn(&ChartPointSO3) -> Result<KForm>,
{
    at.validate()?;
    let x0 = at.coords();
    let reach = step
        * x0.map(|v| v.abs().max(1.0))
            .iter()
            .fold(0.0f64, |m, &v| m.max(v));
    if at.alpha - reach <= 0.0
        || at.alpha + reach >= FRAC_PI_2
        || at.theta - reach <= 0.0
        || at.theta + reach >= PI
        || at.s - reach <= 0.0
        || at.t - reach <= 0.0
    {
        return Err(Error::OutOfChart("finite-difference stencil leaves chart"));
    }
    let c = at.c;
    crate::form::numeric_exterior_derivative(
        |x: &[f64; DIM]| field(&ChartPointSO3::from_coords(x, c)),
        &x0,
        step,
    )
}

/// d xi_0 from the structure equations:
/// xi1 ^ rho1 + xi2 ^ rho2 + xi3 ^ rho3 + (a1 Omega1 + a2 Omega2 + a3 Omega3)/2.
/// Closed-form oracle for the numeric exterior derivative.
pub fn dxi0_closed_form(p: &ChartPointSO3) -> Result<KForm> {
    let x = p.coords();
    let raw = raw_structure(&x, p.c);
    let a = a_values(&x);
    let omega = raw.omega_cap()?;
    let mut out = KForm::zero(2)?;
    for i in 0..3 {
        out = out.add(&raw.xi[i + 1].wedge(&raw.rho[i])?)?;
        out = out.add(&omega[i].scale(a[i + 1] / 2.0))?;
    }
    Ok(out)
}

/// All four d xi_i from the structure equations, over coordinates.
pub fn dxi_closed_form(p: &ChartPointSO3) -> Result<[KForm; 4]> {
    let x = p.coords();
    let raw = raw_structure(&x, p.c);
    let a = a_values(&x);
    let omega = raw.omega_cap()?;
    let xi = &raw.xi;
    let rho = &raw.rho;
    let half = |f: KForm| f.scale(0.5);
    let d0 = dxi0_closed_form(p)?;
    let mut d = [d0, KForm::zero(2)?, KForm::zero(2)?, KForm::zero(2)?];
    for i in 0..3 {
        let (j, k) = cyclic(i);
        // d xi_i = -xi0 ^ rho_i - xi_j ^ rho_k + xi_k ^ rho_j
        //          + (-a0 Omega_i - a_j Omega_k + a_k Omega_j)/2
        let mut di = xi[0].wedge(&rho[i])?.scale(-1.0);
        di = di.sub(&xi[j].wedge(&rho[k - 1])?)?;
        di = di.add(&xi[k].wedge(&rho[j - 1])?)?;
        di = di.add(&half(omega[i].scale(-a[0])))?;
        di = di.add(&half(omega[k - 1].scale(-a[j])))?;
        di = di.add(&half(omega[j - 1].scale(a[k])))?;
        d[i + 1] = di;
    }
    Ok(d)
}
