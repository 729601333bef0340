//! Tanh-sinh (double exponential) quadrature on finite intervals.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Result of a quadrature: value and an a-posteriori error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

const MAX_LEVEL: usize = 12;
const T_MAX: f64 = 4.5;

/// Integrates `f` over `[a, b]`, refining until successive levels agree to
/// `tol` (absolute). Endpoint singularities of integrable type are fine.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure("infinite interval".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);

    // Sum of w(t) * [f(left) + f(right)] over abscissae t = k*h, k > 0.
    let pair = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance to the nearest endpoint, free of cancellation
        let dist = half * (-u).exp() / ch;
        if dist <= 0.0 || w == 0.0 {
            return 0.0;
        }
        let (xl, xr) = (lo + dist, hi - dist);
        let fl = if xl > lo { f(xl) } else { 0.0 };
        let fr = if xr < hi { f(xr) } else { 0.0 };
        w * (fl + fr)
    };

    let mut h = 1.0;
    let mut sum = FRAC_PI_2 * f(mid);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum += pair(k as f64 * h);
        k += 1;
    }
    let mut prev = sum * h * half;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        let mut add = 0.0;
        while (k as f64) * h <= T_MAX {
            add += pair(k as f64 * h);
            k += 2;
        }
        sum += add;
        let cur = sum * h * half;
        let err = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::QuadratureFailure("non-finite integrand".into()));
        }
        if err <= tol && level >= 3 {
            return Ok(Quadrature { value: sign * cur, error: err });
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure(format!("no convergence on [{lo}, {hi}] within {MAX_LEVEL} levels")))
}

/// Integrates over consecutive pieces `points[i]..points[i+1]` and sums.
pub fn tanh_sinh_split<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> Result<Quadrature> {
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let q = tanh_sinh(&f, w[0], w[1], tol / pieces)?;
        value += q.value;
        error += q.error;
    }
    Ok(Quadrature { value, error })
}
