//! The Sp(1) x Id_1 Cayley fibration as a planar phase portrait.
//!
//! After the fibre-direction reduction a_i = (a_i(0)/a_0(0)) a_0 with
//! a_0 = r/p, the Cayley condition collapses to one ODE in the (alpha, r)
//! strip, recast as the flow of X = (f1, f2) with
//!   f1 = cos a (-f cos^2 a + 3 l^2 g r^2),
//!   f2 = l (l^2 g r^2 - 3 f cos^2 a) r,
//! where l = (sin a - 1)/2, f = 5(c+r^2)^{3/5}, g = 4(c+r^2)^{-2/5}.
//! X vanishes at (-pi/2, 0) and along alpha = pi/2; two solutions can only
//! meet there. The critical curves alpha_c (f1 = 0) and beta_c (f2 = 0)
//! split the strip into the sign regions that drive the classification.

use std::f64::consts::FRAC_PI_2;

use crate::cayley::{is_cayley, FourPlane};
use crate::error::{Error, Result};
use crate::form::TangentVector;
use crate::geometry::{build_sp1_pack, ChartPointSp1};
use crate::numeric::log_log_fit;
use crate::ode::{integrate_adaptive, rk4_fixed, Integration, RkOptions};

/// alpha threshold for the "reached alpha = pi/2" terminal event.
const PI_HALF_EVENT_EPS: f64 = 1e-6;
/// r below this, close to alpha = -pi/2, counts as reaching the node.
const NODE_R_EPS: f64 = 1e-6;
/// Switch radius between arclength integration and the log-r tail.
const TAIL_SWITCH_R: f64 = 25.0;

/// A point of the (alpha, r) phase strip with its scale parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sp1PhaseState {
    pub alpha: f64,
    pub r: f64,
    pub c: f64,
}

impl Sp1PhaseState {
    pub fn new(alpha: f64, r: f64, c: f64) -> Result<Self> {
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::OutOfRange("alpha outside [-pi/2, pi/2]"));
        }
        if r < 0.0 || !r.is_finite() {
            return Err(Error::OutOfRange("r must be nonnegative"));
        }
        if c < 0.0 {
            return Err(Error::OutOfRange("c must be nonnegative"));
        }
        Ok(Sp1PhaseState { alpha, r, c })
    }

    /// l = (sin alpha - 1)/2; never cached, always recomputed.
    pub fn l(&self) -> f64 {
        (self.alpha.sin() - 1.0) / 2.0
    }

    /// f = 5 (c + r^2)^{3/5}.
    pub fn f(&self) -> f64 {
        5.0 * (self.c + self.r * self.r).powf(0.6)
    }

    /// g = 4 (c + r^2)^{-2/5}.
    pub fn g(&self) -> f64 {
        4.0 * (self.c + self.r * self.r).powf(-0.4)
    }
}

/// The planar vector field X = (f1, f2).
pub fn f1_f2(state: &Sp1PhaseState) -> (f64, f64) {
    let (ca, l) = (state.alpha.cos(), state.l());
    let (f, g) = (state.f(), state.g());
    let r2 = state.r * state.r;
    let f1 = ca * (-f * ca * ca + 3.0 * l * l * g * r2);
    let f2 = l * (l * l * g * r2 - 3.0 * f * ca * ca) * state.r;
    (f1, f2)
}

/// dr/dalpha = f2/f1 with its analytic limit 0 at alpha = pi/2.
pub fn slope_dr_dalpha(state: &Sp1PhaseState) -> f64 {
    if state.alpha.cos() < 1e-14 {
        return 0.0;
    }
    let (f1, f2) = f1_f2(state);
    f2 / f1
}

/// The zero curve of f1: alpha_c(r) = arcsin(-(2r^2+5c)/(8r^2+5c)).
pub fn alpha_c(r: f64, c: f64) -> Result<f64> {
    if r < 0.0 || c < 0.0 {
        return Err(Error::OutOfRange("r and c must be nonnegative"));
    }
    if r == 0.0 && c == 0.0 {
        return Err(Error::OutOfRange("alpha_c undefined at (r, c) = (0, 0)"));
    }
    let r2 = r * r;
    Ok((-(2.0 * r2 + 5.0 * c) / (8.0 * r2 + 5.0 * c)).asin())
}

/// The zero curve of f2: beta_c(r) = arcsin(-(14r^2+15c)/(16r^2+15c)).
pub fn beta_c(r: f64, c: f64) -> Result<f64> {
    if r < 0.0 || c < 0.0 {
        return Err(Error::OutOfRange("r and c must be nonnegative"));
    }
    if r == 0.0 && c == 0.0 {
        return Err(Error::OutOfRange("beta_c undefined at (r, c) = (0, 0)"));
    }
    let r2 = r * r;
    Ok((-(14.0 * r2 + 15.0 * c) / (16.0 * r2 + 15.0 * c)).asin())
}

/// Multi-moment map of this action:
/// nu = (5/6)(r^2-5c)(c+r^2)^{1/5}(sin a - 1)^3
///      - (25/2)(c+r^2)^{6/5} cos^2 a (sin a - 1).
pub fn multi_moment_sp1(alpha: f64, r: f64, c: f64) -> Result<f64> {
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::OutOfRange("alpha outside [-pi/2, pi/2]"));
    }
    if r < 0.0 || c < 0.0 {
        return Err(Error::OutOfRange("r and c must be nonnegative"));
    }
    let r2 = r * r;
    let sm1 = alpha.sin() - 1.0;
    let ca2 = alpha.cos().powi(2);
    Ok(
        5.0 / 6.0 * (r2 - 5.0 * c) * (c + r2).powf(0.2) * sm1.powi(3)
            - 25.0 / 2.0 * (c + r2).powf(1.2) * ca2 * sm1,
    )
}

/// Coefficients of the metric restricted to an invariant fibre:
///   (5(c+r^2)^{3/5}cos^2 a + 4(c+r^2)^{-2/5} l^2 r^2) (sigma^2 sum)
///   + 4(c+r^2)^{-2/5} dr^2 + 5(c+r^2)^{3/5} d alpha^2.
#[derive(Debug, Clone, Copy)]
pub struct RestrictedMetricSp1 {
    pub sigma_coeff: f64,
    pub dr_coeff: f64,
    pub dalpha_coeff: f64,
}

pub fn restricted_metric_sp1(state: &Sp1PhaseState) -> RestrictedMetricSp1 {
    let (f, g, l) = (state.f(), state.g(), state.l());
    let ca2 = state.alpha.cos().powi(2);
    let r2 = state.r * state.r;
    RestrictedMetricSp1 {
        sigma_coeff: f * ca2 + g * l * l * r2,
        dr_coeff: g,
        dalpha_coeff: f,
    }
}

/// Integration direction through the vector field X.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// Terminal and recorded events of a fibre integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sp1Event {
    /// Crossed the vertical-tangent curve f1 = 0.
    CrossedAlphaC { alpha: f64, r: f64 },
    /// Crossed the horizontal-tangent curve f2 = 0.
    CrossedBetaC { alpha: f64, r: f64 },
    /// Reached alpha = pi/2 at height r0; slope = dr/dalpha there.
    ReachedPiHalf { r0: f64, slope: f64 },
    /// Escaped past the r cutoff at the recorded alpha.
    ReachedRMax { alpha: f64, r: f64 },
    /// Converged into the equilibrium (-pi/2, 0).
    ReachedNode,
    /// The launch lay on one of the exact solutions {r = 0}, {a = -pi/2}.
    ExactSolution,
}

/// Topology of a completed fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sp1Topology {
    S3xR,
    /// Smooth R^4 closing up at alpha = pi/2 (the group orbit collapses).
    R4Blue,
    /// Smooth R^4 through the node (-pi/2, 0).
    R4Green,
    S4ZeroSection,
    VerticalFibre,
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub r_max: f64,
    /// Terminal at alpha_c / beta_c crossings (the single-leg contract);
    /// fibre tracing continues through them and records the hit.
    pub stop_at_critical: bool,
    pub rk: RkOptions,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            r_max: 1e8,
            stop_at_critical: true,
            rk: RkOptions {
                h_max: 0.02,
                max_steps: 400_000,
                ..RkOptions::default()
            },
        }
    }
}

/// One leg of a fibre: samples plus the events met along the way. The last
/// event is the terminal one.
#[derive(Debug, Clone)]
pub struct FibreCurveSp1 {
    pub samples: Vec<(f64, f64)>,
    pub launch: Sp1PhaseState,
    pub events: Vec<Sp1Event>,
    pub topology: Option<Sp1Topology>,
}

fn unit_field(c: f64, dir: f64) -> impl Fn(&[f64; 2]) -> Result<[f64; 2]> {
    move |y: &[f64; 2]| {
        let state = Sp1PhaseState {
            alpha: y[0],
            r: y[1],
            c,
        };
        let (f1, f2) = f1_f2(&state);
        let speed = (f1 * f1 + f2 * f2).sqrt();
        if speed < 1e-280 {
            return Err(Error::NoConvergence("flow stalled at an equilibrium"));
        }
        Ok([dir * f1 / speed, dir * f2 / speed])
    }
}

/// Integrates one leg from `launch` in the given direction until a
/// terminal event. Exact solutions are returned analytically.
pub fn integrate_fibre(
    launch: &Sp1PhaseState,
    direction: Direction,
    opts: &IntegrateOptions,
) -> Result<FibreCurveSp1> {
    // the two exact solutions
    if launch.r == 0.0 {
        let n = 201;
        let samples = (0..n)
            .map(|i| {
                let a = -FRAC_PI_2 + (i as f64 + 0.5) / (n as f64) * std::f64::consts::PI;
                (a, 0.0)
            })
            .collect();
        return Ok(FibreCurveSp1 {
            samples,
            launch: *launch,
            events: vec![Sp1Event::ExactSolution],
            topology: Some(Sp1Topology::S4ZeroSection),
        });
    }
    if launch.alpha == -FRAC_PI_2 {
        let n = 201;
        let samples = (0..n)
            .map(|i| (-FRAC_PI_2, launch.r * 2.0 * (i as f64 + 1.0) / n as f64))
            .collect();
        return Ok(FibreCurveSp1 {
            samples,
            launch: *launch,
            events: vec![Sp1Event::ExactSolution],
            topology: Some(Sp1Topology::VerticalFibre),
        });
    }
    if launch.alpha.abs() >= FRAC_PI_2 || launch.r <= 0.0 {
        return Err(Error::OutOfRange("launch outside the open strip"));
    }

    let c = launch.c;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut events: Vec<Sp1Event> = Vec::new();
    let mut y = [launch.alpha, launch.r];
    let mut finished = false;

    for _legs in 0..64 {
        let rhs = unit_field(c, direction.sign());
        // event functions over the raw state
        let ev_alpha_c = |y: &[f64; 2]| {
            f1_f2(&Sp1PhaseState {
                alpha: y[0],
                r: y[1],
                c,
            })
            .0
        };
        let ev_beta_c = |y: &[f64; 2]| {
            f1_f2(&Sp1PhaseState {
                alpha: y[0],
                r: y[1],
                c,
            })
            .1
        };
        let ev_pihalf = |y: &[f64; 2]| y[0] - (FRAC_PI_2 - PI_HALF_EVENT_EPS);
        let tail_r = TAIL_SWITCH_R.max(2.0 * y[1]).min(opts.r_max);
        let ev_tail = move |y: &[f64; 2]| y[1] - tail_r;
        let ev_rdip = |y: &[f64; 2]| y[1] - NODE_R_EPS;
        let evs: [&dyn Fn(&[f64; 2]) -> f64; 5] =
            [&ev_alpha_c, &ev_beta_c, &ev_pihalf, &ev_tail, &ev_rdip];

        let leg: Integration<2> = integrate_adaptive(&rhs, y, 1e9, &opts.rk, &evs)?;
        samples.extend(leg.samples.iter().map(|&(_, s)| (s[0], s[1])));
        let (_, end) = *leg.samples.last().expect("at least the initial sample");
        let state = Sp1PhaseState {
            alpha: end[0],
            r: end[1],
            c,
        };
        match leg.event {
            Some(0) => {
                events.push(Sp1Event::CrossedAlphaC {
                    alpha: end[0],
                    r: end[1],
                });
                if opts.stop_at_critical {
                    finished = true;
                    break;
                }
                y = nudge_past(&state, direction)?;
            }
            Some(1) => {
                events.push(Sp1Event::CrossedBetaC {
                    alpha: end[0],
                    r: end[1],
                });
                if opts.stop_at_critical {
                    finished = true;
                    break;
                }
                y = nudge_past(&state, direction)?;
            }
            Some(2) => {
                // refine to alpha = pi/2 in graph form; dr/dalpha is
                // smooth with limit 0 there
                let (r0, slope) = refine_to_pi_half(&state)?;
                samples.push((FRAC_PI_2, r0));
                events.push(Sp1Event::ReachedPiHalf { r0, slope });
                finished = true;
                break;
            }
            Some(3) => {
                // log-r tail out to r_max
                if end[1] >= opts.r_max {
                    events.push(Sp1Event::ReachedRMax {
                        alpha: end[0],
                        r: end[1],
                    });
                    finished = true;
                    break;
                }
                let (tail, alpha_end) = integrate_tail(&state, opts.r_max)?;
                samples.extend(tail);
                events.push(Sp1Event::ReachedRMax {
                    alpha: alpha_end,
                    r: opts.r_max,
                });
                finished = true;
                break;
            }
            Some(4) => {
                // r dipped through the node radius: terminal only when the
                // orbit is actually at the corner; interior dips shadow the
                // zero-section solution and continue toward alpha = pi/2
                if (end[0] + FRAC_PI_2).abs() < 0.1 {
                    events.push(Sp1Event::ReachedNode);
                    finished = true;
                    break;
                }
                y = nudge_past(&state, direction)?;
            }
            Some(_) => unreachable!("event index"),
            None => {
                return Err(Error::NoConvergence("fibre integration hit no event"));
            }
        }
    }

    if !finished {
        return Err(Error::NoConvergence("fibre integration leg budget"));
    }

    Ok(FibreCurveSp1 {
        samples,
        launch: *launch,
        events,
        topology: None,
    })
}

/// Steps a touch past a critical-curve crossing so the resumed integration
/// does not immediately re-trigger the same event.
fn nudge_past(state: &Sp1PhaseState, direction: Direction) -> Result<[f64; 2]> {
    let rhs = unit_field(state.c, direction.sign());
    let y = [state.alpha, state.r];
    crate::ode::rk4_step(&rhs, &y, 1e-9)
}

/// Continues a trajectory from near alpha = pi/2 to exactly pi/2 in the
/// graph parametrization dr/dalpha = f2/f1 (smooth through the end), and
/// returns (r0, slope at pi/2 - 1e-6).
fn refine_to_pi_half(state: &Sp1PhaseState) -> Result<(f64, f64)> {
    let c = state.c;
    let slope_at = |alpha: f64, r: f64| slope_dr_dalpha(&Sp1PhaseState { alpha, r, c });
    let rhs = |y: &[f64; 2]| Ok([1.0, slope_at(y[0], y[1])]);
    let span = FRAC_PI_2 - state.alpha;
    let states = rk4_fixed(&rhs, [state.alpha, state.r], span / 64.0, 64)?;
    let end = states.last().expect("nonempty");
    let slope = slope_at(FRAC_PI_2 - PI_HALF_EVENT_EPS, end[1]);
    Ok((end[1], slope))
}

/// Escape tail in tau = ln r: d alpha / d tau = r f1 / f2, integrated out
/// to r_max with samples roughly log-uniform in r.
fn integrate_tail(state: &Sp1PhaseState, r_max: f64) -> Result<(Vec<(f64, f64)>, f64)> {
    let c = state.c;
    let rhs = |y: &[f64; 2]| {
        let r = y[1].exp();
        let s = Sp1PhaseState { alpha: y[0], r, c };
        let (f1, f2) = f1_f2(&s);
        if f2 == 0.0 {
            return Err(Error::NoConvergence("tail integration crossed f2 = 0"));
        }
        Ok([r * f1 / f2, 1.0])
    };
    let tau0 = state.r.ln();
    let tau1 = r_max.ln();
    let steps_per_decade = 256;
    let decades = (tau1 - tau0) / std::f64::consts::LN_10;
    let steps = ((decades * steps_per_decade as f64).ceil() as usize).max(16);
    let h = (tau1 - tau0) / steps as f64;
    let states = rk4_fixed(&rhs, [state.alpha, tau0], h, steps)?;
    let out: Vec<(f64, f64)> = states.iter().map(|y| (y[0], y[1].exp())).collect();
    let alpha_end = out.last().expect("nonempty").0;
    Ok((out, alpha_end))
}

/// Integrates both directions from the launch, continuing through the
/// critical-curve crossings, and classifies the resulting fibre.
pub fn trace_fibre(launch: &Sp1PhaseState, opts: &IntegrateOptions) -> Result<FibreCurveSp1> {
    if launch.r == 0.0 || launch.alpha == -FRAC_PI_2 {
        return integrate_fibre(launch, Direction::Forward, opts);
    }
    let through = IntegrateOptions {
        stop_at_critical: false,
        ..opts.clone()
    };
    let back = integrate_fibre(launch, Direction::Backward, &through)?;
    let fwd = integrate_fibre(launch, Direction::Forward, &through)?;
    let mut samples: Vec<(f64, f64)> = back.samples.iter().rev().copied().collect();
    samples.extend(fwd.samples.iter().copied());
    let mut events = back.events.clone();
    events.extend(fwd.events.iter().copied());
    let mut curve = FibreCurveSp1 {
        samples,
        launch: *launch,
        events,
        topology: None,
    };
    curve.topology = Some(classify_sp1(&curve)?);
    Ok(curve)
}

/// Classification from the terminal events of the two legs:
/// node -> green R^4, alpha = pi/2 -> blue R^4, both escapes -> S^3 x R.
pub fn classify_sp1(curve: &FibreCurveSp1) -> Result<Sp1Topology> {
    if let Some(t) = curve.topology {
        return Ok(t);
    }
    if curve
        .events
        .iter()
        .any(|e| matches!(e, Sp1Event::ExactSolution))
    {
        // set by the exact-solution constructors
        return Err(Error::OutOfRange("exact solutions carry their topology"));
    }
    let node = curve
        .events
        .iter()
        .any(|e| matches!(e, Sp1Event::ReachedNode));
    let pihalf = curve
        .events
        .iter()
        .any(|e| matches!(e, Sp1Event::ReachedPiHalf { .. }));
    let escapes = curve
        .events
        .iter()
        .filter(|e| matches!(e, Sp1Event::ReachedRMax { .. }))
        .count();
    if node {
        Ok(Sp1Topology::R4Green)
    } else if pihalf {
        Ok(Sp1Topology::R4Blue)
    } else if escapes >= 2 {
        Ok(Sp1Topology::S3xR)
    } else {
        Err(Error::NoConvergence("fibre ends not resolved"))
    }
}

/// Which asymptotic end of a fibre a cone fit targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sp1ConeEnd {
    /// alpha -> -pi/2 as r -> infinity (cone coefficient 9/25).
    AlphaToMinusPiHalf,
    /// alpha -> arcsin(-1/4) as r -> infinity (cone coefficient 9/16).
    AlphaToCritical,
}

/// Asymptotic-cone fit over samples with r in [1e4, 1e6], against
/// ds^2 + coeff s^2 g_{S^3} with s = (10/3) r^{3/5}.
#[derive(Debug, Clone)]
pub struct Sp1ConeReport {
    pub cone_coeff: f64,
    pub slope: f64,
    pub fit_error: f64,
    pub radial_direction_error: f64,
    pub alpha_limit: f64,
}

/// Runs the escaping leg from `launch` out to r = 2e6 and fits the cone.
pub fn cone_fit_sp1(launch: &Sp1PhaseState, end: Sp1ConeEnd) -> Result<Sp1ConeReport> {
    let direction = match end {
        // region I backward escapes to alpha -> -pi/2; region II forward
        // escapes to alpha -> arcsin(-1/4)
        Sp1ConeEnd::AlphaToMinusPiHalf => Direction::Backward,
        Sp1ConeEnd::AlphaToCritical => Direction::Forward,
    };
    let opts = IntegrateOptions {
        r_max: 2e6,
        stop_at_critical: false,
        ..Default::default()
    };
    let leg = integrate_fibre(launch, direction, &opts)?;
    if !leg
        .events
        .iter()
        .any(|e| matches!(e, Sp1Event::ReachedRMax { .. }))
    {
        return Err(Error::NoConvergence("leg did not escape to large r"));
    }
    let c = launch.c;
    let mut ss = Vec::new();
    let mut cs = Vec::new();
    let mut last: Option<Sp1PhaseState> = None;
    for &(alpha, r) in &leg.samples {
        if !(1e4..=1e6).contains(&r) {
            continue;
        }
        let state = Sp1PhaseState { alpha, r, c };
        let m = restricted_metric_sp1(&state);
        let s = 10.0 / 3.0 * r.powf(0.6);
        ss.push(s);
        cs.push(m.sigma_coeff);
        last = Some(state);
    }
    if ss.len() < 8 {
        return Err(Error::NoConvergence("too few tail samples in [1e4, 1e6]"));
    }
    let (_, slope) = log_log_fit(&ss, &cs)?;
    let mean_log: f64 = ss
        .iter()
        .zip(&cs)
        .map(|(s, cval)| (cval / (s * s)).ln())
        .sum::<f64>()
        / ss.len() as f64;
    let cone_coeff = mean_log.exp();
    let fit_error = ss
        .iter()
        .zip(&cs)
        .map(|(s, cval)| (cval / (s * s) / cone_coeff - 1.0).abs())
        .fold(0.0f64, f64::max);
    let state = last.expect("nonempty");
    let m = restricted_metric_sp1(&state);
    // ds/dr = 2 r^{-2/5}; dalpha/dr = f1/f2 along the flow
    let (f1, f2) = f1_f2(&state);
    let dadr = f1 / f2;
    let dr_ds = state.r.powf(0.4) / 2.0;
    let radial = (m.dr_coeff + m.dalpha_coeff * dadr * dadr) * dr_ds * dr_ds;
    Ok(Sp1ConeReport {
        cone_coeff,
        slope,
        fit_error,
        radial_direction_error: (radial - 1.0).abs(),
        alpha_limit: state.alpha,
    })
}

/// Normalized Cayley residual |eta|/vol_4 of the invariant tangent plane
/// at one phase state: span of the three orbit directions and the flow
/// velocity, assembled in the Sp(1)-chart coframe. `a_hat` is the unit
/// fibre direction of the reduction and `orbit` fixes a point on the
/// group orbit (the residual is invariant under it).
pub fn cayley_residual_at(state: &Sp1PhaseState, a_hat: [f64; 4], orbit: [f64; 3]) -> Result<f64> {
    let (f1, f2) = f1_f2(state);
    let speed = (f1 * f1 + f2 * f2).sqrt();
    if speed < 1e-250 {
        return Err(Error::OutOfRange("state is an equilibrium of the flow"));
    }
    let point = ChartPointSp1::new(state.alpha, orbit, a_hat.map(|v| v * state.r), state.c)?;
    let pack = build_sp1_pack(&point)?;
    let l = point.l();
    let a = point.a;
    // orbit directions in the pack basis: d_i = e_i - l * action_i
    let action: [[f64; 4]; 3] = [
        [-a[1], a[0], a[3], -a[2]],
        [-a[2], -a[3], a[0], a[1]],
        [-a[3], a[2], -a[1], a[0]],
    ];
    let mut span = [TangentVector::zero(); 4];
    for i in 0..3 {
        let mut comps = [0.0; 8];
        comps[1 + i] = 1.0;
        for k in 0..4 {
            comps[4 + k] = -l * action[i][k];
        }
        span[i] = TangentVector::new(comps);
    }
    // velocity alpha' e_alpha + sum a_i' e_{xi_i}, a_i' = a_hat_i r'
    let mut vel = [0.0; 8];
    vel[0] = f1 / speed;
    for k in 0..4 {
        vel[4 + k] = a_hat[k] * f2 / speed;
    }
    span[3] = TangentVector::new(vel);
    // unit-normalize the spanning set: near alpha = pi/2 the orbit
    // collapses and the raw 4-volume underflows the degeneracy guard,
    // while the normalized residual is scale-free anyway
    for v in &mut span {
        let n = pack.metric.vector_norm(v);
        *v = v.scale(1.0 / n);
    }
    let plane = FourPlane::new(span, &pack.metric)?;
    let verdict = is_cayley(&plane, &pack, 1.0)?;
    Ok(verdict.residual)
}

/// Max normalized Cayley residual |eta| along an integrated curve.
/// `a_hat` fixes the fibre direction of the reduction (unit vector;
/// defaults to e_0 if None).
pub fn verify_cayley_sp1(curve: &FibreCurveSp1, a_hat: Option<[f64; 4]>, tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::OutOfRange("tolerance must be positive"));
    }
    let c = curve.launch.c;
    let a_hat = a_hat.unwrap_or([1.0, 0.0, 0.0, 0.0]);
    let norm: f64 = a_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Err(Error::OutOfRange("a_hat must be nonzero"));
    }
    let a_hat = a_hat.map(|v| v / norm);
    let orbit = [0.9, 1.1, 0.7];
    let mut worst: f64 = 0.0;
    let margin = 1e-4;
    for &(alpha, r) in &curve.samples {
        if alpha.abs() >= FRAC_PI_2 - margin || !(1e-3..=1e4).contains(&r) {
            continue;
        }
        let state = Sp1PhaseState { alpha, r, c };
        worst = worst.max(cayley_residual_at(&state, a_hat, orbit)?);
    }
    Ok(worst)
}

/// Multi-moment contraction diagnostic, as in the SO(3) chart: ratio
/// range of gen_3 -| gen_2 -| gen_1 -| Phi_c against d nu over the
/// coordinate differentials.
pub fn moment_contraction_ratio_sp1(p: &ChartPointSp1) -> Result<(f64, f64)> {
    use crate::form::interior_product;
    let x = p.coords();
    let phi = crate::geometry::sp1::phi_in_coordinates(&x, p.c)?;
    let gens = crate::geometry::sp1::orbit_generators(&x);
    let w = interior_product(
        &gens[2],
        &interior_product(&gens[1], &interior_product(&gens[0], &phi)?)?,
    )?;
    let c = p.c;
    let nu_at = |y: &[f64; 8]| -> f64 {
        let r = (y[4] * y[4] + y[5] * y[5] + y[6] * y[6] + y[7] * y[7]).sqrt();
        multi_moment_sp1(y[0], r, c).unwrap_or(f64::NAN)
    };
    let mut dnu = [0.0f64; 8];
    for (j, slot) in dnu.iter_mut().enumerate() {
        if (1..=3).contains(&j) {
            continue; // nu is orbit-invariant
        }
        let h = 1e-6 * x[j].abs().max(1.0);
        let mut xp = x;
        xp[j] += h;
        let mut xm = x;
        xm[j] -= h;
        *slot = (nu_at(&xp) - nu_at(&xm)) / (2.0 * h);
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
