//! Shared helpers for the integration tests. The quadrature oracle lives
//! here, independent of the library's special-function evaluation path.
#![allow(dead_code)]

/// Adaptive Simpson quadrature with an absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 64)
}

/// Composite Gauss-Legendre (16-point panels), refined by doubling the
/// panel count until two successive values agree to `tol`. A second,
/// independent fixed-rule route for cross-checks.
pub fn gauss_legendre_refined<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    // 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
    const X: [f64; 8] = [
        0.0950125098376374,
        0.2816035507792589,
        0.4580167776572274,
        0.6178762444026437,
        0.755404408355003,
        0.8656312023878317,
        0.9445750230732326,
        0.9894009349916499,
    ];
    const W: [f64; 8] = [
        0.1894506104550685,
        0.1826034150449236,
        0.1691565193950025,
        0.1495959888165767,
        0.1246289712555339,
        0.0951585116824928,
        0.0622535239386479,
        0.0271524594117541,
    ];
    let panel = |lo: f64, hi: f64| -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut s = 0.0;
        for k in 0..8 {
            s += W[k] * (f(mid + half * X[k]) + f(mid - half * X[k]));
        }
        s * half
    };
    let mut n = 4usize;
    let mut prev = f64::NAN;
    for _ in 0..16 {
        let h = (b - a) / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            total += panel(a + i as f64 * h, a + (i + 1) as f64 * h);
        }
        if (total - prev).abs() <= tol {
            return total;
        }
        prev = total;
        n *= 2;
    }
    prev
}
