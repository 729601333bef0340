use crate::error::{Error, Result};
use crate::models::{SummandFamily, SummandModel};
use crate::pmf::DiscretePmf;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

/// Piecewise-constant density: `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDensity {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepDensity {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidParameter("step density needs k+1 breakpoints for k values".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("density values must be nonnegative".into()));
        }
        let mut cumulative = vec![0.0];
        let mut acc = 0.0;
        for (i, v) in values.iter().enumerate() {
            acc += v * (breakpoints[i + 1] - breakpoints[i]);
            cumulative.push(acc);
        }
        Ok(Self { breakpoints, values, cumulative })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < self.breakpoints[0] || x >= *self.breakpoints.last().unwrap() {
            return 0.0;
        }
        let i = self.breakpoints.partition_point(|&b| b <= x) - 1;
        self.values[i]
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.breakpoints[0] {
            return 0.0;
        }
        if x >= *self.breakpoints.last().unwrap() {
            return self.integral();
        }
        let i = self.breakpoints.partition_point(|&b| b <= x) - 1;
        self.cumulative[i] + self.values[i] * (x - self.breakpoints[i])
    }

    /// Piecewise-linear inversion of the CDF.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let target = u.clamp(0.0, 1.0) * self.integral();
        let mut i = self.cumulative.partition_point(|&c| c < target).saturating_sub(1);
        i = i.min(self.values.len() - 1);
        // skip flat pieces
        while self.values[i] == 0.0 && i + 1 < self.values.len() {
            i += 1;
        }
        let x = self.breakpoints[i] + (target - self.cumulative[i]) / self.values[i];
        x.clamp(self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_cdf(rng.random::<f64>())
    }

    /// E[f'(Y)] for Y with this density, computed exactly as
    /// sum_i v_i (f(b_{i+1}) - f(b_i)).
    pub fn expect_derivative(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().enumerate().map(|(i, v)| v * (f(self.breakpoints[i + 1]) - f(self.breakpoints[i]))).sum()
    }
}

/// Zero-bias density of a centered finite law: E[X 1{X>y}] / Var(X).
pub fn zero_bias_density(pmf: &DiscretePmf) -> Result<StepDensity> {
    let scale = pmf.support().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mean = pmf.mean();
    if mean.abs() > 1e-12 * scale {
        return Err(Error::NotCentered(mean));
    }
    let var = pmf.expect(|x| x * x);
    if pmf.len() < 2 || !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let xs = pmf.support();
    let ps = pmf.probs();
    let m = xs.len();
    // tail[i] = sum_{j > i} x_j p_j
    let mut values = vec![0.0; m - 1];
    let mut tail = 0.0;
    for i in (0..m - 1).rev() {
        tail += xs[i + 1] * ps[i + 1];
        values[i] = (tail / var).max(0.0);
    }
    StepDensity::new(xs.to_vec(), values)
}

/// Sampler for the non-zero-biased law (X - a)* + a.
#[derive(Debug, Clone)]
pub enum NonZeroBias {
    Step {
        density: StepDensity,
        shift: f64,
    },
    /// Exponential(rate) maps to Gamma(2, 1/rate).
    Gamma2 {
        rate: f64,
        gamma: Gamma<f64>,
    },
    /// Uniform(center - half, center + half) maps to the parabolic density
    /// 3 (h^2 - y^2) / (4 h^3) around the center.
    Parabolic {
        center: f64,
        half: f64,
    },
}

impl NonZeroBias {
    pub fn new(model: &SummandModel) -> Result<Self> {
        let m = model.moments();
        if !(m.c2 > 0.0) {
            return Err(Error::ZeroVariance);
        }
        match model.family() {
            SummandFamily::Exponential { rate } => {
                Ok(Self::Gamma2 { rate: *rate, gamma: Gamma::new(2.0, 1.0 / rate).expect("positive rate") })
            }
            SummandFamily::Uniform { lo, hi } => Ok(Self::Parabolic { center: 0.5 * (lo + hi), half: 0.5 * (hi - lo) }),
            _ => {
                let pmf = model.finite_pmf().ok_or(Error::ZeroVariance)?;
                let centered =
                    DiscretePmf::new(pmf.support().iter().map(|x| x - m.a).collect(), pmf.probs().to_vec(), 0.0)?;
                Ok(Self::Step { density: zero_bias_density(&centered)?, shift: m.a })
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Step { density, shift } => density.sample(rng) + shift,
            Self::Gamma2 { gamma, .. } => gamma.sample(rng),
            Self::Parabolic { center, half } => {
                // Devroye: the median-magnitude rule on three uniforms
                let v1: f64 = rng.random_range(-1.0..1.0);
                let v2: f64 = rng.random_range(-1.0..1.0);
                let v3: f64 = rng.random_range(-1.0..1.0);
                let y = if v3.abs() >= v2.abs() && v3.abs() >= v1.abs() { v2 } else { v3 };
                center + half * y
            }
        }
    }

    /// CDF of the non-zero-biased law.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Step { density, shift } => density.cdf(x - shift),
            Self::Gamma2 { rate, .. } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-rate * x).exp() * (1.0 + rate * x)
                }
            }
            Self::Parabolic { center, half } => {
                let y = ((x - center) / half).clamp(-1.0, 1.0);
                0.5 + 0.75 * (y - y * y * y / 3.0)
            }
        }
    }
}

/// One draw from the law of X^{nz}.
pub fn non_zero_bias_sample<R: Rng + ?Sized>(model: &SummandModel, rng: &mut R) -> Result<f64> {
    Ok(NonZeroBias::new(model)?.sample(rng))
}

/// S_n - X_1 + Y with Y non-zero-biased and independent: a draw from the
/// non-zero-biased law of S_n.
pub fn sum_non_zero_bias<R: Rng + ?Sized>(model: &SummandModel, n: u64, rng: &mut R) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let nz = NonZeroBias::new(model)?;
    let rest = model.sampler().sample_sum(n - 1, rng);
    Ok(rest + nz.sample(rng))
}
