//! Adaptive Runge-Kutta integration with terminal event detection.
//!
//! Dormand-Prince 5(4) with PI-free step control, cubic Hermite dense
//! output for event localization, and bisection-refined event times. The
//! fibration flows pass near equilibria, so the callers normalize their
//! fields to unit speed and integrate in arclength.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RkOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Relative tolerance for the bisection of event times.
    pub event_tol: f64,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: 0.25,
            max_steps: 200_000,
            event_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Integration<const N: usize> {
    /// Accepted states (t, y), including the initial state and, for a
    /// triggered event, the refined terminal state.
    pub samples: Vec<(f64, [f64; N])>,
    /// Index into the event slice of the terminal event, if one fired.
    pub event: Option<usize>,
    pub steps: usize,
}

fn add_scaled<const N: usize>(y: &[f64; N], k: &[f64; N], s: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += s * k[i];
    }
    out
}

/// One classical RK4 step.
pub fn rk4_step<const N: usize, F>(rhs: &F, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let k1 = rhs(y)?;
    let k2 = rhs(&add_scaled(y, &k1, 0.5 * h))?;
    let k3 = rhs(&add_scaled(y, &k2, 0.5 * h))?;
    let k4 = rhs(&add_scaled(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Fixed-step RK4 over `steps` steps; returns every accepted state.
pub fn rk4_fixed<const N: usize, F>(
    rhs: &F,
    y0: [f64; N],
    h: f64,
    steps: usize,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0);
    let mut y = y0;
    for _ in 0..steps {
        y = rk4_step(rhs, &y, h)?;
        out.push(y);
    }
    Ok(out)
}

fn hermite<const N: usize>(
    y0: &[f64; N],
    f0: &[f64; N],
    y1: &[f64; N],
    f1: &[f64; N],
    h: f64,
    theta: f64,
) -> [f64; N] {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

/// Adaptive integration of y' = rhs(y) from t = 0 to t = t_max, stopping at
/// the first sign change of any event function. Event times are refined by
/// bisection on the dense output.
pub fn integrate_adaptive<const N: usize, F>(
    rhs: &F,
    y0: [f64; N],
    t_max: f64,
    opts: &RkOptions,
    events: &[&dyn Fn(&[f64; N]) -> f64],
) -> Result<Integration<N>>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    // Dormand-Prince 5(4) tableau
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut t = 0.0;
    let mut y = y0;
    let mut f_now = rhs(&y)?;
    let mut h = opts.h_init.min(opts.h_max);
    let mut samples = vec![(t, y)];
    let mut g_now: Vec<f64> = events.iter().map(|e| e(&y)).collect();
    let mut steps = 0usize;

    while t < t_max && steps < opts.max_steps {
        h = h.min(t_max - t).max(opts.h_min);
        let mut k = [[0.0; N]; 7];
        k[0] = f_now;
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                for i in 0..N {
                    ys[i] += h * A[stage][j] * kj[i];
                }
            }
            k[stage + 1] = rhs(&ys)?;
        }
        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            for i in 0..N {
                y5[i] += h * B5[j] * kj[i];
                y4[i] += h * B4[j] * kj[i];
            }
        }
        let mut err: f64 = 0.0;
        for i in 0..N {
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4[i]) / sc;
            err += e * e;
        }
        let err = (err / N as f64).sqrt();

        if err <= 1.0 || h <= opts.h_min * 1.0001 {
            steps += 1;
            let f_new = k[6]; // FSAL: last stage is rhs at y5
            let g_new: Vec<f64> = events.iter().map(|e| e(&y5)).collect();
            let mut triggered: Option<(usize, f64)> = None;
            for (idx, (&g0, &g1)) in g_now.iter().zip(g_new.iter()).enumerate() {
                if g0 == 0.0 {
                    continue; // started on the event surface; cross only counts after leaving it
                }
                if g1 == 0.0 || g0.signum() != g1.signum() {
                    // bisect the crossing fraction
                    let ev = events[idx];
                    let mut lo = 0.0f64;
                    let mut hi = 1.0f64;
                    for _ in 0..100 {
                        if hi - lo < opts.event_tol {
                            break;
                        }
                        let mid = 0.5 * (lo + hi);
                        let ym = hermite(&y, &f_now, &y5, &f_new, h, mid);
                        let gm = ev(&ym);
                        if gm == 0.0 {
                            lo = mid;
                            hi = mid;
                            break;
                        }
                        if gm.signum() == g0.signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let theta = 0.5 * (lo + hi);
                    match triggered {
                        Some((_, t0)) if t0 <= theta => {}
                        _ => triggered = Some((idx, theta)),
                    }
                }
            }
            if let Some((idx, theta)) = triggered {
                let ye = hermite(&y, &f_now, &y5, &f_new, h, theta);
                samples.push((t + theta * h, ye));
                return Ok(Integration {
                    samples,
                    event: Some(idx),
                    steps,
                });
            }
            t += h;
            y = y5;
            f_now = f_new;
            g_now = g_new;
            samples.push((t, y));
        }

        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).clamp(opts.h_min, opts.h_max);
    }

    if steps >= opts.max_steps {
        return Err(Error::NoConvergence("adaptive integrator step budget"));
    }
    Ok(Integration {
        samples,
        event: None,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_circular_motion() {
        let rhs = |y: &[f64; 2]| Ok([-y[1], y[0]]);
        let res = integrate_adaptive(
            &rhs,
            [1.0, 0.0],
            std::f64::consts::PI,
            &RkOptions::default(),
            &[],
        )
        .unwrap();
        let (_, end) = res.samples.last().unwrap();
        assert!((end[0] + 1.0).abs() < 1e-8 && end[1].abs() < 1e-8);
    }

    #[test]
    fn event_stops_at_axis_crossing() {
        let rhs = |y: &[f64; 2]| Ok([-y[1], y[0]]);
        let cross = |y: &[f64; 2]| y[1] - 0.5;
        let res =
            integrate_adaptive(&rhs, [1.0, 0.0], 10.0, &RkOptions::default(), &[&cross]).unwrap();
        assert_eq!(res.event, Some(0));
        let (t, end) = res.samples.last().unwrap();
        assert!((end[1] - 0.5).abs() < 1e-9);
        // crossing of sin(t) = 1/2
        assert!((t - std::f64::consts::FRAC_PI_6).abs() < 1e-8);
    }

    #[test]
    fn rk4_fixed_conserves_energy_well() {
        let rhs = |y: &[f64; 2]| Ok([-y[1], y[0]]);
        let states = rk4_fixed(&rhs, [1.0, 0.0], 1e-3, 10_000).unwrap();
        for y in states {
            let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-10);
        }
    }
}
