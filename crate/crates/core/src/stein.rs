//! Solutions of the Stein equation f'(x) - x f(x) = h(x) - E[h(Z)] for the
//! standard normal target.

use crate::error::{Error, Result};
use crate::quadrature::tanh_sinh_split;
use crate::special::{mills_ratio, norm_cdf, norm_pdf, norm_sf, SQRT_2PI};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// sup of f_z over the line, attained at z = x = 0.
pub const FZ_SUP: f64 = SQRT_2PI / 4.0;

const UPPER: f64 = 40.0;
const QUAD_TOL: f64 = 1e-13;

/// f_z(x) for the half-line indicator h_z = 1{. <= z}.
pub fn fz_value(z: f64, x: f64) -> f64 {
    if x <= z {
        // (1 - Phi(z)) Phi(x) / phi(x)
        if x <= 0.0 {
            norm_sf(z) * mills_ratio(-x)
        } else {
            norm_cdf(x) * mills_ratio(z) * (0.5 * (x * x - z * z)).exp()
        }
    } else {
        // Phi(z) (1 - Phi(x)) / phi(x)
        if x >= 0.0 {
            norm_cdf(z) * mills_ratio(x)
        } else {
            norm_sf(x) * mills_ratio(-z) * (0.5 * (x * x - z * z)).exp()
        }
    }
}

/// f_z'(x), with f_z'(z) := z f_z(z) + 1 - Phi(z).
pub fn fz_derivative(z: f64, x: f64) -> f64 {
    if x == z {
        return z * fz_value(z, z) + norm_sf(z);
    }
    if x < z {
        // (1 - Phi(z)) (1 + x Phi(x) / phi(x))
        if x <= 0.0 {
            norm_sf(z) * (1.0 - (-x) * mills_ratio(-x))
        } else {
            norm_sf(z) + x * fz_value(z, x)
        }
    } else {
        // Phi(z) (x (1 - Phi(x)) / phi(x) - 1)
        if x >= 0.0 {
            norm_cdf(z) * (x * mills_ratio(x) - 1.0)
        } else {
            x * fz_value(z, x) - norm_cdf(z)
        }
    }
}

type TestFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Stein solution for an indicator or a 1-Lipschitz test function.
#[derive(Clone)]
pub enum SteinSolution {
    Indicator { z: f64 },
    Lipschitz { h: TestFn, kinks: Vec<f64>, mean: f64 },
}

impl fmt::Debug for SteinSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SteinSolution::Indicator { z } => write!(f, "Indicator {{ z: {z} }}"),
            SteinSolution::Lipschitz { kinks, mean, .. } => {
                write!(f, "Lipschitz {{ kinks: {kinks:?}, mean: {mean} }}")
            }
        }
    }
}

fn breakpoints(lo: f64, hi: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(extra.into_iter().filter(|p| *p > lo && *p < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

impl SteinSolution {
    pub fn indicator(z: f64) -> Self {
        SteinSolution::Indicator { z }
    }

    /// Solution for a 1-Lipschitz `h` whose derivative jumps only at `kinks`.
    pub fn lipschitz(h: impl Fn(f64) -> f64 + Send + Sync + 'static, kinks: &[f64]) -> Result<Self> {
        let pts = breakpoints(-UPPER, UPPER, kinks.iter().copied().chain([0.0]));
        let mean = tanh_sinh_split(|t| h(t) * norm_pdf(t), &pts, QUAD_TOL)?.value;
        Ok(SteinSolution::Lipschitz { h: Arc::new(h), kinks: kinks.to_vec(), mean })
    }

    /// E[h(Z)]; Phi(z) for the indicator.
    pub fn mean(&self) -> f64 {
        match self {
            SteinSolution::Indicator { z } => norm_cdf(*z),
            SteinSolution::Lipschitz { mean, .. } => *mean,
        }
    }

    pub fn test_function(&self, x: f64) -> f64 {
        match self {
            SteinSolution::Indicator { z } => f64::from(x <= *z),
            SteinSolution::Lipschitz { h, .. } => h(x),
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        match self {
            SteinSolution::Indicator { z } => Ok(fz_value(*z, x)),
            SteinSolution::Lipschitz { .. } => {
                if x <= 0.0 {
                    self.value_lower_form(x)
                } else {
                    self.value_upper_form(x)
                }
            }
        }
    }

    /// f'(x) := x f(x) + h(x) - E[h(Z)].
    pub fn derivative(&self, x: f64) -> Result<f64> {
        match self {
            SteinSolution::Indicator { z } => Ok(fz_derivative(*z, x)),
            SteinSolution::Lipschitz { .. } => Ok(x * self.value(x)? + self.test_function(x) - self.mean()),
        }
    }

    fn lipschitz_parts(&self) -> Result<(&TestFn, &[f64], f64)> {
        match self {
            SteinSolution::Lipschitz { h, kinks, mean } => Ok((h, kinks, *mean)),
            SteinSolution::Indicator { .. } => {
                Err(Error::InvalidParameter("integral forms apply to Lipschitz test functions".into()))
            }
        }
    }

    fn split_points(x: f64, kinks: impl Iterator<Item = f64>) -> Vec<f64> {
        let scale = if x.abs() > 0.1 { vec![1.0 / x.abs(), 10.0 / x.abs()] } else { vec![] };
        breakpoints(0.0, UPPER, kinks.chain(scale).chain([1.0, 5.0]))
    }

    /// int_0^inf (h(x - u) - E h) e^{xu - u^2/2} du, accurate for x <= 0.
    pub fn value_lower_form(&self, x: f64) -> Result<f64> {
        let (h, kinks, mean) = self.lipschitz_parts()?;
        let pts = Self::split_points(x, kinks.iter().map(|k| x - k));
        Ok(tanh_sinh_split(|u| (h(x - u) - mean) * (x * u - 0.5 * u * u).exp(), &pts, QUAD_TOL)?.value)
    }

    /// -int_0^inf (h(x + u) - E h) e^{-xu - u^2/2} du, accurate for x > 0.
    pub fn value_upper_form(&self, x: f64) -> Result<f64> {
        let (h, kinks, mean) = self.lipschitz_parts()?;
        let pts = Self::split_points(x, kinks.iter().map(|k| k - x));
        Ok(-tanh_sinh_split(|u| (h(x + u) - mean) * (-x * u - 0.5 * u * u).exp(), &pts, QUAD_TOL)?.value)
    }
}

/// f_h(x) for a 1-Lipschitz `h` with the given kinks.
pub fn fh_value(h: impl Fn(f64) -> f64 + Send + Sync + 'static, kinks: &[f64], x: f64) -> Result<f64> {
    SteinSolution::lipschitz(h, kinks)?.value(x)
}

/// Outcome of checking an analytic inequality over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub violations: usize,
    /// Smallest bound - value over the grid; negative on violation.
    pub min_slack: f64,
}

impl CheckReport {
    fn new() -> Self {
        Self { checked: 0, violations: 0, min_slack: f64::INFINITY }
    }

    fn record(&mut self, value: f64, bound: f64) {
        let slack = bound - value;
        self.checked += 1;
        if slack < -1e-12 * bound.abs().max(1.0) {
            self.violations += 1;
        }
        self.min_slack = self.min_slack.min(slack);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn merge(self, other: Self) -> Self {
        Self {
            checked: self.checked + other.checked,
            violations: self.violations + other.violations,
            min_slack: self.min_slack.min(other.min_slack),
        }
    }
}

/// Taylor remainder bound for f_z at (x, u).
pub fn fz_taylor_bound(z: f64, x: f64, u: f64) -> f64 {
    let jump = z - u.max(0.0) < x && x <= z - u.min(0.0);
    0.5 * u * u * (x.abs() + FZ_SUP) + if jump { u.abs() } else { 0.0 }
}

/// Checks |f_z(x+u) - f_z(x) - f_z'(x) u| against its bound on (x, u, z) triples.
pub fn fz_taylor_check(grid: &[(f64, f64, f64)]) -> CheckReport {
    let mut rep = CheckReport::new();
    for &(x, u, z) in grid {
        let r = (fz_value(z, x + u) - fz_value(z, x) - fz_derivative(z, x) * u).abs();
        rep.record(r, fz_taylor_bound(z, x, u));
    }
    rep
}

/// Checks |f_h(x+y) - f_h(x) - f_h'(x) y| <= y^2 on (x, y) pairs.
pub fn fh_taylor_check(solution: &SteinSolution, grid: &[(f64, f64)]) -> Result<CheckReport> {
    let mut rep = CheckReport::new();
    for &(x, y) in grid {
        let r = (solution.value(x + y)? - solution.value(x)? - solution.derivative(x)? * y).abs();
        // allowance for the quadrature error in the three evaluations
        rep.record(r, y * y + 1e-10);
    }
    Ok(rep)
}

/// Both Taylor checks on (x, y, z) triples: f_h uses (x, y), f_z uses (x, y, z).
pub fn taylor_remainder_bounds_check(grid: &[(f64, f64, f64)], lipschitz: &SteinSolution) -> Result<CheckReport> {
    let pairs: Vec<(f64, f64)> = grid.iter().map(|&(x, y, _)| (x, y)).collect();
    Ok(fz_taylor_check(grid).merge(fh_taylor_check(lipschitz, &pairs)?))
}

/// Checks |(x+u) f_z(x+u) - (x+v) f_z(x+v)| <= (|x| + sqrt(2 pi)/4)(|u| + |v|)
/// on (x, u, v, z) tuples.
pub fn fz_difference_check(grid: &[(f64, f64, f64, f64)]) -> CheckReport {
    let mut rep = CheckReport::new();
    for &(x, u, v, z) in grid {
        let g = |t: f64| t * fz_value(z, t);
        rep.record((g(x + u) - g(x + v)).abs(), (x.abs() + FZ_SUP) * (u.abs() + v.abs()));
    }
    rep
}
