//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Central n-th difference with spacing `h`.
fn central_difference(f: &dyn Fn(f64) -> f64, t: f64, n: usize, h: f64) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for j in 0..=n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * f(t + (n as f64 / 2.0 - j as f64) * h);
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    sum / h.powi(n as i32)
}

/// n-th derivative by Richardson/Neville extrapolation of central
/// differences (Ridders). `h0` should be comparable to the scale on which
/// `f` varies.
pub fn ridders_derivative(f: &dyn Fn(f64) -> f64, t: f64, n: usize, h0: f64) -> f64 {
    const CON: f64 = 1.25;
    const NTAB: usize = 14;
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = central_difference(f, t, n, h);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = central_difference(f, t, n, h);
        let mut fac = CON * CON;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON * CON;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
    }
    best
}
