//! The completely integrable Cayley fibration of the SO(3) x Id_2 action.
//!
//! After the reduction u = s t, v = s / t, an invariant submanifold is
//! Cayley exactly when beta, delta, v and
//!   F = 2 sin^{5/2}(a) cos^{1/2}(a) (v^2 + 1) u + 5 c v H(a)
//! are constant, with H the primitive of h(a) = (sin a cos a)^{3/2}
//! normalized by H(0) = 0. Level sets of F in the (alpha, u) half-strip
//! are the fibres; their topology is decided by where u reaches 0.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numeric::{bisect, log_log_fit};
use crate::special::{complete_beta_5454, incomplete_beta_5454};

/// Absolute tolerance deciding F0 = 5 c v0 H(pi/2), the singular fibre.
pub const TOPOLOGY_F_TOL: f64 = 1e-9;
/// Bisection tolerance for u = 0 endpoints.
pub const ENDPOINT_TOL: f64 = 1e-10;
/// u cutoff where traced curves are truncated toward the chart ends.
pub const U_CAP_DEFAULT: f64 = 1e4;

/// h(a) = (sin a cos a)^{3/2}, the integrand of H.
pub fn h_integrand(alpha: f64) -> f64 {
    let p = alpha.sin() * alpha.cos();
    p.max(0.0).powf(1.5)
}

/// H(a) = int_0^a h, via H(a) = B(sin^2 a; 5/4, 5/4)/2.
pub fn h_primitive(alpha: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::OutOfRange("alpha outside [0, pi/2]"));
    }
    let x = alpha.sin().powi(2);
    Ok(incomplete_beta_5454(x.clamp(0.0, 1.0))? / 2.0)
}

/// H(pi/2), the total mass of h.
pub fn h_total() -> f64 {
    complete_beta_5454() / 2.0
}

/// F(alpha, u, v, c), the conserved quantity in the (u, v) variables.
pub fn conserved_f(alpha: f64, u: f64, v: f64, c: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::OutOfRange("alpha outside [0, pi/2]"));
    }
    Ok(
        2.0 * alpha.sin().powf(2.5) * alpha.cos().sqrt() * (v * v + 1.0) * u
            + 5.0 * c * v * h_primitive(alpha)?,
    )
}

/// Parameters fixing one fibre: the constants of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SO3FibreParams {
    pub beta0: f64,
    pub delta0: f64,
    /// v = s/t > 0.
    pub v0: f64,
    /// Level of F; nonnegative.
    pub f0: f64,
    pub c: f64,
}

impl SO3FibreParams {
    pub fn new(beta0: f64, delta0: f64, v0: f64, f0: f64, c: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(Error::OutOfRange("v0 must be positive"));
        }
        if f0 < 0.0 || !f0.is_finite() {
            return Err(Error::OutOfRange("F0 must be nonnegative"));
        }
        if c < 0.0 {
            return Err(Error::OutOfRange("c must be nonnegative"));
        }
        Ok(SO3FibreParams {
            beta0,
            delta0,
            v0,
            f0,
            c,
        })
    }

    /// The F level separating the three fibre topologies.
    pub fn threshold(&self) -> f64 {
        5.0 * self.c * self.v0 * h_total()
    }
}

/// Topology of a traced fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum So3Topology {
    /// u -> 0 exactly at alpha = pi/2: the conically singular R^4 fibre.
    R4Singular,
    /// u -> 0 at some alpha_0 < pi/2: the O(-1) line bundle over CP^1.
    OMinus1,
    /// u > 0 throughout: S^3 x R.
    RxS3,
}

/// A traced level set of F.
#[derive(Debug, Clone)]
pub struct FibreCurveSO3 {
    /// (alpha, u) samples, strictly increasing in alpha.
    pub samples: Vec<(f64, f64)>,
    pub params: SO3FibreParams,
    pub topology: So3Topology,
    /// Max relative recomputed-F deviation over the samples.
    pub conserved_drift: f64,
    /// The u = 0 endpoint when one exists.
    pub alpha0: Option<f64>,
}

/// The denominator D(a) = 2 sin^{5/2} cos^{1/2} (v^2+1) of the level-set
/// graph u(a) = (F0 - 5 c v0 H(a)) / D(a).
fn denom(alpha: f64, v0: f64) -> f64 {
    2.0 * alpha.sin().powf(2.5) * alpha.cos().sqrt() * (v0 * v0 + 1.0)
}

fn denom_prime(alpha: f64, v0: f64) -> f64 {
    let (sa, ca) = (alpha.sin(), alpha.cos());
    (v0 * v0 + 1.0) * sa.powf(1.5) / ca.sqrt() * (5.0 * ca * ca - sa * sa)
}

/// The level-set graph u(alpha) for the given fibre constants.
pub fn u_of_alpha(params: &SO3FibreParams, alpha: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < FRAC_PI_2) {
        return Err(Error::OutOfRange("alpha outside (0, pi/2)"));
    }
    Ok((params.f0 - 5.0 * params.c * params.v0 * h_primitive(alpha)?) / denom(alpha, params.v0))
}

/// d u / d alpha along the level set.
pub fn du_dalpha(params: &SO3FibreParams, alpha: f64) -> Result<f64> {
    let num = params.f0 - 5.0 * params.c * params.v0 * h_primitive(alpha)?;
    let d = denom(alpha, params.v0);
    Ok(
        (-5.0 * params.c * params.v0 * h_integrand(alpha) * d
            - num * denom_prime(alpha, params.v0))
            / (d * d),
    )
}

/// Classification from the fibre constants alone: compares F0 against the
/// singular level 5 c v0 H(pi/2) with an absolute tolerance, so the
/// measure-zero singular fibre is targetable exactly.
pub fn classify_so3(params: &SO3FibreParams) -> So3Topology {
    let threshold = params.threshold();
    if params.c > 0.0 && (params.f0 - threshold).abs() <= TOPOLOGY_F_TOL {
        So3Topology::R4Singular
    } else if params.c > 0.0 && params.f0 < threshold {
        So3Topology::OMinus1
    } else {
        So3Topology::RxS3
    }
}

/// The u = 0 endpoint of an O(-1) fibre: the root of F0 - 5 c v0 H.
pub fn alpha_zero_of(params: &SO3FibreParams) -> Result<f64> {
    let num = |a: f64| params.f0 - 5.0 * params.c * params.v0 * h_primitive(a).unwrap_or(f64::NAN);
    bisect(num, 1e-12, FRAC_PI_2 - 1e-12, ENDPOINT_TOL)
}

/// A point on the curve's alpha axis where u is small (the interior
/// minimum for S^3 x R fibres, or just left of the u = 0 endpoint for the
/// monotone fibres); used as the right edge of left-branch bisections.
fn right_edge(params: &SO3FibreParams, topology: So3Topology) -> Result<f64> {
    match topology {
        So3Topology::RxS3 => u_min_alpha(params),
        So3Topology::R4Singular => Ok(FRAC_PI_2 - 1e-9),
        So3Topology::OMinus1 => Ok(alpha_zero_of(params)? - 1e-12),
    }
}

/// Traces the level set of F on an alpha grid of `n` interior samples.
/// Endpoints where u reaches 0 are resolved by bisection to 1e-10; toward
/// the chart ends the curve is truncated where u crosses `U_CAP_DEFAULT`
/// (also located by bisection).
pub fn trace_level_set(params: &SO3FibreParams, n: usize) -> Result<FibreCurveSO3> {
    if params.f0 <= 0.0 {
        return Err(Error::OutOfRange(
            "F0 must be positive to trace a level set",
        ));
    }
    if n < 2 {
        return Err(Error::OutOfRange("need at least 2 samples"));
    }
    let topology = classify_so3(params);
    let u_cap = U_CAP_DEFAULT;
    let eps = 1e-12;

    // left end: u -> +inf as alpha -> 0; find u(alpha) = u_cap
    let cap_fn = |a: f64| u_of_alpha(params, a).unwrap_or(f64::INFINITY) - u_cap;
    let edge = right_edge(params, topology)?;
    let alpha_lo = if cap_fn(eps) <= 0.0 {
        eps
    } else {
        bisect(cap_fn, eps, edge, ENDPOINT_TOL)?
    };

    // right end depends on topology
    let (alpha_hi, alpha0) = match topology {
        So3Topology::RxS3 => {
            let far = FRAC_PI_2 - eps;
            let hi = if cap_fn(far) <= 0.0 {
                far
            } else {
                bisect(cap_fn, edge, far, ENDPOINT_TOL)?
            };
            (hi, None)
        }
        So3Topology::R4Singular => (FRAC_PI_2, Some(FRAC_PI_2)),
        So3Topology::OMinus1 => {
            let a0 = alpha_zero_of(params)?;
            (a0, Some(a0))
        }
    };

    if !(alpha_hi > alpha_lo) {
        return Err(Error::NoConvergence("empty level-set window"));
    }

    let mut samples = Vec::with_capacity(n + 2);
    let interior_hi = match topology {
        So3Topology::RxS3 => alpha_hi,
        // stop the grid short of the u = 0 end, then append it exactly
        _ => alpha_hi - 1e-8,
    };
    for i in 0..n {
        let a = alpha_lo + (interior_hi - alpha_lo) * i as f64 / (n - 1) as f64;
        let u = u_of_alpha(params, a)?;
        if u >= 0.0 && u.is_finite() {
            samples.push((a, u));
        }
    }
    if let Some(a0) = alpha0 {
        samples.push((a0, 0.0));
    }

    // conserved drift: recompute F along the samples (u = 0 endpoints sit
    // on the chart boundary where F is still defined by continuity)
    let mut drift = 0.0f64;
    for &(a, u) in &samples {
        if a >= FRAC_PI_2 {
            continue;
        }
        let f = conserved_f(a, u, params.v0, params.c)?;
        drift = drift.max((f - params.f0).abs() / params.f0.max(1e-300));
    }

    Ok(FibreCurveSO3 {
        samples,
        params: *params,
        topology,
        conserved_drift: drift,
        alpha0,
    })
}

/// The alpha of minimal u along the level set (bisection on du/dalpha).
fn u_min_alpha(params: &SO3FibreParams) -> Result<f64> {
    let lo = 1e-6;
    let hi = FRAC_PI_2 - 1e-9;
    let slope = |a: f64| du_dalpha(params, a).unwrap_or(f64::NAN);
    if params.c == 0.0 {
        // exact: tan^2 a = 5
        return Ok((1.0 / 6.0f64.sqrt()).acos());
    }
    bisect(slope, lo, hi, 1e-13)
}

/// Locus of the u-minimum of the level set through (u, v):
/// alpha = arccos( sqrt( u(v^2+1) / (6u(v^2+1) + 5cv) ) ).
pub fn u_min_locus(u: f64, v: f64, c: f64) -> Result<f64> {
    if u <= 0.0 {
        return Err(Error::OutOfRange("u must be positive"));
    }
    if v <= 0.0 {
        return Err(Error::OutOfRange("v must be positive"));
    }
    if c < 0.0 {
        return Err(Error::OutOfRange("c must be nonnegative"));
    }
    let k = u * (v * v + 1.0);
    Ok((k / (6.0 * k + 5.0 * c * v)).sqrt().acos())
}

/// Unit-speed Cayley velocity at a chart state (alpha, beta, s, t, delta):
/// beta' = delta' = 0, s/t frozen, and the (alpha, u) direction tangent to
/// the level set of F, normalized to unit Euclidean speed in the (alpha,
/// u) plane.
pub fn ode_rhs_so3(state: &[f64; 5], c: f64) -> Result<[f64; 5]> {
    let (alpha, s, t) = (state[0], state[2], state[3]);
    if !(0.0 < alpha && alpha < FRAC_PI_2) || s <= 0.0 || t <= 0.0 {
        return Err(Error::OutOfChart("state outside the SO(3) chart"));
    }
    let r2 = s * s + t * t;
    let u = s * t;
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let alpha_dot = 2.0 * sa * ca * r2;
    let u_dot = -(5.0 * (c + r2) * ca * ca - r2 * sa * sa) * u;
    let speed = (alpha_dot * alpha_dot + u_dot * u_dot).sqrt();
    let (alpha_dot, u_dot) = (alpha_dot / speed, u_dot / speed);
    let s_dot = u_dot * s / (2.0 * u);
    let t_dot = u_dot * t / (2.0 * u);
    Ok([alpha_dot, 0.0, s_dot, t_dot, 0.0])
}

/// The seven residuals of the full Cayley ODE system at (state, velocity),
/// velocity ordered (alpha', beta', s', t', delta'):
///   1. (s^2+t^2) sin^2 a cos a  b'
///   2. cos^2 a (t s' - s t')
///   3. cos^2 a  s t  d'
///   4. -5(c+r^2)cos^2 a s a' + r^2 sin^2 a s a'
///        - 2 sin a cos a t^2 s' - 4 sin a cos a s^2 s' - 2 sin a cos a s t t'
///   5.  5(c+r^2)cos^2 a t a' - r^2 sin^2 a t a'
///        + 2 sin a cos a s^2 t' + 4 sin a cos a t^2 t' + 2 sin a cos a s t s'
///   6.  5(c+r^2) sin a cos^2 a b' s - 2 sin a cos a t^2 s d' - r^2 sin^3 a b' s
///   7. -5(c+r^2) sin a cos^2 a b' t - 2 sin a cos a t s^2 d' + r^2 sin^3 a b' t
pub fn theorem_residuals_so3(state: &[f64; 5], velocity: &[f64; 5], c: f64) -> [f64; 7] {
    let (alpha, s, t) = (state[0], state[2], state[3]);
    let (ad, bd, sd, td, dd) = (
        velocity[0],
        velocity[1],
        velocity[2],
        velocity[3],
        velocity[4],
    );
    let r2 = s * s + t * t;
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let sc = sa * ca;
    [
        r2 * sa * sa * ca * bd,
        ca * ca * (t * sd - s * td),
        ca * ca * s * t * dd,
        -5.0 * (c + r2) * ca * ca * s * ad + r2 * sa * sa * s * ad
            - 2.0 * sc * t * t * sd
            - 4.0 * sc * s * s * sd
            - 2.0 * sc * s * t * td,
        5.0 * (c + r2) * ca * ca * t * ad - r2 * sa * sa * t * ad
            + 2.0 * sc * s * s * td
            + 4.0 * sc * t * t * td
            + 2.0 * sc * s * t * sd,
        5.0 * (c + r2) * sa * ca * ca * bd * s
            - 2.0 * sc * t * t * s * dd
            - r2 * sa.powi(3) * bd * s,
        -5.0 * (c + r2) * sa * ca * ca * bd * t - 2.0 * sc * t * s * s * dd
            + r2 * sa.powi(3) * bd * t,
    ]
}

/// Multi-moment map of the SO(3)-chart SU(2) action in (alpha, u, v):
/// nu = (5/6)(c+R)^{1/5}(6R cos^2 a - R + 5c) - (25/6)c^{6/5},
/// R = u(1+v^2)/v.
pub fn multi_moment_so3(alpha: f64, u: f64, v: f64, c: f64) -> Result<f64> {
    if u < 0.0 {
        return Err(Error::OutOfRange("u must be nonnegative"));
    }
    if v <= 0.0 {
        return Err(Error::OutOfRange("v must be positive"));
    }
    if c < 0.0 {
        return Err(Error::OutOfRange("c must be nonnegative"));
    }
    let r = u * (1.0 + v * v) / v;
    let ca2 = alpha.cos().powi(2);
    Ok(5.0 / 6.0 * (c + r).powf(0.2) * (6.0 * r * ca2 - r + 5.0 * c) - 25.0 / 6.0 * c.powf(1.2))
}

/// Restricted-metric coefficients at a point of a fibre (the directions
/// sigma1, sigma2 = sigma3, du and d alpha that survive the restriction):
///   sigma1: (c+R)^{-2/5} R
///   sigma2/3: 5(c+R)^{3/5} cos^2 a + (c+R)^{-2/5} R sin^2 a
///   du^2: (c+R)^{-2/5}(1+v^2)/(u v)
///   d alpha^2: 5(c+R)^{3/5}
pub struct RestrictedMetricSo3 {
    pub sigma1: f64,
    pub sigma23: f64,
    pub du2: f64,
    pub dalpha2: f64,
}

pub fn restricted_metric_so3(alpha: f64, u: f64, v: f64, c: f64) -> RestrictedMetricSo3 {
    let r = u * (1.0 + v * v) / v;
    let gpow = (c + r).powf(-0.4);
    let fpow = 5.0 * (c + r).powf(0.6);
    let (sa, ca) = (alpha.sin(), alpha.cos());
    RestrictedMetricSo3 {
        sigma1: gpow * r,
        sigma23: fpow * ca * ca + gpow * r * sa * sa,
        du2: gpow * (1.0 + v * v) / (u * v),
        dalpha2: fpow,
    }
}

/// The invariant tangent frame of the reduced flow, in the diagonalizing
/// dual frame (e_a, e_b, e_2, e_3, e_s, e_t, e_w1, e_w2):
///   u = t e_w2 - s e_w1,
///   v = e_2 + (sin a/2)(t e_s - s e_t),
///   w = e_3 + sin a (t e_w1 + s e_w2),
///   y = s' e_s + t' e_t + a' e_a + b' e_b + d'(s e_w1 + t e_w2).
pub fn invariant_frame(
    p: &crate::geometry::ChartPointSO3,
    vel: &[f64; 5],
) -> [crate::form::TangentVector; 4] {
    use crate::form::TangentVector;
    let (s, t, sa) = (p.s, p.t, p.alpha.sin());
    let (ad, bd, sd, td, dd) = (vel[0], vel[1], vel[2], vel[3], vel[4]);
    [
        TangentVector::new([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -s, t]),
        TangentVector::new([0.0, 0.0, 1.0, 0.0, sa * t / 2.0, -sa * s / 2.0, 0.0, 0.0]),
        TangentVector::new([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, sa * t, sa * s]),
        TangentVector::new([ad, bd, 0.0, 0.0, sd, td, dd * s, dd * t]),
    ]
}

/// Normalized Cayley residual |eta|/vol_4 of the invariant tangent plane
/// at a chart point, with the velocity taken from the reduced flow.
pub fn cayley_residual_at(p: &crate::geometry::ChartPointSO3) -> Result<f64> {
    use crate::cayley::{is_cayley, FourPlane};
    let pack = crate::geometry::build_so3_pack(p, crate::geometry::So3Basis::Diagonalizing)?;
    let state = [p.alpha, p.beta, p.s, p.t, p.delta];
    let vel = ode_rhs_so3(&state, p.c)?;
    let mut span = invariant_frame(p, &vel);
    for v in &mut span {
        let n = pack.metric.vector_norm(v);
        *v = v.scale(1.0 / n);
    }
    let plane = FourPlane::new(span, &pack.metric)?;
    Ok(is_cayley(&plane, &pack, 1.0)?.residual)
}

/// Diagnostic for the multi-moment normalization: componentwise ratio of
/// the triple contraction gen_3 -| gen_2 -| gen_1 -| Phi_c against d nu
/// (both over coordinate differentials) at a chart point. The generators
/// are the sigma-dual orbit frame. Returns (min, max) over the components
/// where either 1-form is significant; a tight interval means the two
/// agree up to that constant.
pub fn moment_contraction_ratio_so3(p: &crate::geometry::ChartPointSO3) -> Result<(f64, f64)> {
    use crate::form::interior_product;
    let x = p.coords();
    let phi = crate::geometry::so3::phi_in_coordinates(&x, p.c)?;
    let gens = crate::geometry::so3::orbit_generators(&x);
    let w = interior_product(
        &gens[2],
        &interior_product(&gens[1], &interior_product(&gens[0], &phi)?)?,
    )?;
    // d nu over coordinates (nu depends on alpha, s, t only)
    let c = p.c;
    let nu_at = |y: &[f64; 8]| -> f64 {
        let (s, t) = (y[5], y[6]);
        multi_moment_so3(y[0], s * t, s / t, c).unwrap_or(f64::NAN)
    };
    let mut dnu = [0.0f64; 8];
    for j in [0usize, 5, 6] {
        let h = 1e-6 * x[j].abs().max(1.0);
        let mut xp = x;
        xp[j] += h;
        let mut xm = x;
        xm[j] -= h;
        dnu[j] = (nu_at(&xp) - nu_at(&xm)) / (2.0 * h);
    }
    let mut scale = 0.0f64;
    for j in 0..8 {
        scale = scale.max(w.coeff(&[j]).abs()).max(dnu[j].abs());
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..8 {
        let wj = w.coeff(&[j]);
        if wj.abs().max(dnu[j].abs()) > 1e-6 * scale {
            let ratio = wj / dnu[j];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Ok((lo, hi))
}

/// Which end of the fibre the asymptotic-cone fit targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeEnd {
    AlphaToZero,
    AlphaToPiHalf,
}

/// Asymptotic-cone fit report. For the Bryant-Salamon fibres the radial
/// coefficient tends to 9/25 with squashing 1/5 at the alpha ~ 0 end and
/// 1 (round link) at the alpha ~ pi/2 end.
#[derive(Debug, Clone)]
pub struct ConeReport {
    /// Fitted coefficient of r^2 (link scale): 4 C_sigma1 / r^2.
    pub radial_coeff: f64,
    /// Power-law slope of C_sigma1 against r (2 for a cone).
    pub slope: f64,
    /// Ratio sigma1-coefficient / sigma2-coefficient at the largest u.
    pub squashing: f64,
    /// Max relative deviation of 4 C_sigma1 / r^2 from the fit.
    pub fit_error: f64,
    /// | (radial metric along the curve) (du/dr)^2 - 1 | at the largest u.
    pub radial_direction_error: f64,
}

/// Cone radius r(u) = (10/3) ((1+v^2)/v)^{3/10} u^{3/10}.
pub fn cone_radius(u: f64, v: f64) -> f64 {
    10.0 / 3.0 * ((1.0 + v * v) / v).powf(0.3) * u.powf(0.3)
}

/// Fits the asymptotic cone of a fibre end over u in [1e4, 1e6]
/// (log-spaced; log-log regression per the sampling design).
pub fn asymptotic_cone_so3(curve: &FibreCurveSO3, end: ConeEnd) -> Result<ConeReport> {
    let params = &curve.params;
    if end == ConeEnd::AlphaToPiHalf && curve.topology != So3Topology::RxS3 {
        return Err(Error::OutOfRange(
            "only S^3 x R fibres reach large u at the pi/2 end",
        ));
    }
    let edge = right_edge(params, curve.topology)?;
    let n = 16;
    let mut rs = Vec::with_capacity(n);
    let mut c1s = Vec::with_capacity(n);
    let mut last: Option<(f64, f64)> = None; // (alpha, u)
    for i in 0..n {
        let u_target = 1e4 * (1e6f64 / 1e4).powf(i as f64 / (n - 1) as f64);
        let f = |a: f64| u_of_alpha(params, a).unwrap_or(f64::NAN) - u_target;
        let alpha = match end {
            ConeEnd::AlphaToZero => bisect(f, 1e-9, edge, 1e-16)?,
            // u ~ (F0 - T)/(4 sqrt(pi/2 - alpha)) near pi/2, so reaching
            // u = 1e6 needs the bracket to hug pi/2 to ~1e-13
            ConeEnd::AlphaToPiHalf => bisect(f, edge, FRAC_PI_2 - 1e-15, 1e-16)?,
        };
        let u = u_of_alpha(params, alpha)?;
        let m = restricted_metric_so3(alpha, u, params.v0, params.c);
        rs.push(cone_radius(u, params.v0));
        c1s.push(m.sigma1);
        last = Some((alpha, u));
    }
    let (_, slope) = log_log_fit(&rs, &c1s)?;
    // log-space mean of 4 C1 / r^2
    let mean_log: f64 = rs
        .iter()
        .zip(&c1s)
        .map(|(r, c1)| (4.0 * c1 / (r * r)).ln())
        .sum::<f64>()
        / rs.len() as f64;
    let radial_coeff = mean_log.exp();
    let fit_error = rs
        .iter()
        .zip(&c1s)
        .map(|(r, c1)| (4.0 * c1 / (r * r) / radial_coeff - 1.0).abs())
        .fold(0.0f64, f64::max);
    let (alpha_last, u_last) = last.expect("n >= 1");
    let m = restricted_metric_so3(alpha_last, u_last, params.v0, params.c);
    let squashing = m.sigma1 / m.sigma23;
    // radial direction: du/dr and dalpha/dr along the curve
    let k = ((1.0 + params.v0 * params.v0) / params.v0).powf(0.3);
    let du_dr = u_last.powf(0.7) / k;
    let dadr = du_dr / du_dalpha(params, alpha_last)?;
    let radial = m.du2 * du_dr * du_dr + m.dalpha2 * dadr * dadr;
    Ok(ConeReport {
        radial_coeff,
        slope,
        squashing,
        fit_error,
        radial_direction_error: (radial - 1.0).abs(),
    })
}

/// Local model of the singular R^4 fibre near alpha = pi/2, evaluated on
/// the quadratic approximation u = A (alpha - pi/2)^2, A = c v/(1+v^2).
/// The limit is the Lawson-Osserman cone shape: sigma ratios (1, 6, 6)
/// and d alpha^2 coefficient 9 c^{3/5}.
#[derive(Debug, Clone)]
pub struct SingularModelReport {
    pub sigma_ratios: (f64, f64, f64),
    pub dalpha_coeff: f64,
    pub expected_dalpha_coeff: f64,
}

pub fn singular_model_so3(v0: f64, c: f64, eps: f64) -> Result<SingularModelReport> {
    if c <= 0.0 {
        return Err(Error::OutOfRange("the singular fibre needs c > 0"));
    }
    if !(v0 > 0.0) {
        return Err(Error::OutOfRange("v0 must be positive"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange("eps must be in (0, 1)"));
    }
    let big_a = c * v0 / (1.0 + v0 * v0);
    let alpha = FRAC_PI_2 - eps;
    let u = big_a * eps * eps;
    let m = restricted_metric_so3(alpha, u, v0, c);
    let du_da = -2.0 * big_a * eps;
    let dalpha_coeff = m.dalpha2 + m.du2 * du_da * du_da;
    Ok(SingularModelReport {
        sigma_ratios: (1.0, m.sigma23 / m.sigma1, m.sigma23 / m.sigma1),
        dalpha_coeff,
        expected_dalpha_coeff: 9.0 * c.powf(0.6),
    })
}

/// Local model of a smooth O(-1) fibre near its u = 0 point alpha_0 < pi/2,
/// on the linear approximation u = -5 c v0 / (2 tan a0 (v0^2+1)) (a - a0).
/// Returns (sigma1-coefficient / (r^2/4), sigma23-coefficient /
/// (5 c^{3/5} cos^2 a0), radial-coefficient / dr^2), all tending to 1.
pub fn smooth_model_so3(v0: f64, c: f64, alpha0: f64, u_eval: f64) -> Result<(f64, f64, f64)> {
    if c <= 0.0 || !(v0 > 0.0) || !(0.0 < alpha0 && alpha0 < FRAC_PI_2) || !(u_eval > 0.0) {
        return Err(Error::OutOfRange("smooth model parameters"));
    }
    let slope = -5.0 * c * v0 / (2.0 * alpha0.tan() * (v0 * v0 + 1.0));
    let alpha = alpha0 + u_eval / slope;
    let m = restricted_metric_so3(alpha, u_eval, v0, c);
    let r2_over4 = (1.0 + v0 * v0) / (v0 * c.powf(0.4)) * u_eval;
    let sig1_ratio = m.sigma1 / r2_over4;
    let sig23_ratio = m.sigma23 / (5.0 * c.powf(0.6) * alpha0.cos().powi(2));
    // dr^2 with r = 2 sqrt(u (1+v^2)/(v c^{2/5})): (du/dr)^2 = u / K^2
    let k2 = (1.0 + v0 * v0) / (v0 * c.powf(0.4));
    let radial = (m.du2 + m.dalpha2 / (slope * slope)) * u_eval / k2;
    Ok((sig1_ratio, sig23_ratio, radial))
}
