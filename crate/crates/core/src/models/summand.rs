use crate::error::{Error, Result};
use crate::pmf::{DiscretePmf, PmfSampler};
use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp, Gamma};
use serde::Serialize;
use std::fmt;

/// Law of a single summand X.
#[derive(Debug, Clone, PartialEq)]
pub enum SummandFamily {
    Constant(f64),
    Bernoulli(f64),
    /// P(X = x1) = p, P(X = x0) = 1 - p.
    TwoPoint {
        x0: f64,
        x1: f64,
        p: f64,
    },
    Exponential {
        rate: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    FinitePmf(DiscretePmf),
}

/// Mean, second moment, variance and third absolute central moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummandMoments {
    pub a: f64,
    pub b2: f64,
    pub c2: f64,
    pub d3: f64,
}

impl SummandMoments {
    pub fn b(&self) -> f64 {
        self.b2.sqrt()
    }
    pub fn c(&self) -> f64 {
        self.c2.sqrt()
    }
}

/// A summand law together with its cached moments.
#[derive(Debug, Clone, PartialEq)]
pub struct SummandModel {
    family: SummandFamily,
    moments: SummandMoments,
}

/// E|X - 1|^3 for X ~ Exp(1).
const EXP_THIRD_ABS: f64 = 12.0 / std::f64::consts::E - 2.0;

fn two_point_moments(x0: f64, x1: f64, p: f64) -> SummandMoments {
    let q = 1.0 - p;
    let delta = x1 - x0;
    let a = q * x0 + p * x1;
    let c2 = p * q * delta * delta;
    SummandMoments { a, b2: q * x0 * x0 + p * x1 * x1, c2, d3: p * q * (p * p + q * q) * delta.abs().powi(3) }
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite")))
    }
}

impl SummandModel {
    pub fn new(family: SummandFamily) -> Result<Self> {
        let moments = match &family {
            SummandFamily::Constant(v) => {
                check_finite("v", *v)?;
                SummandMoments { a: *v, b2: v * v, c2: 0.0, d3: 0.0 }
            }
            SummandFamily::Bernoulli(p) => {
                check_prob(*p)?;
                two_point_moments(0.0, 1.0, *p)
            }
            SummandFamily::TwoPoint { x0, x1, p } => {
                check_prob(*p)?;
                check_finite("x0", *x0)?;
                check_finite("x1", *x1)?;
                two_point_moments(*x0, *x1, *p)
            }
            SummandFamily::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::InvalidParameter("rate must be positive".into()));
                }
                let m = 1.0 / rate;
                SummandMoments { a: m, b2: 2.0 * m * m, c2: m * m, d3: EXP_THIRD_ABS * m * m * m }
            }
            SummandFamily::Uniform { lo, hi } => {
                check_finite("lo", *lo)?;
                check_finite("hi", *hi)?;
                if lo >= hi {
                    return Err(Error::InvalidParameter("uniform needs lo < hi".into()));
                }
                let a = 0.5 * (lo + hi);
                let h = 0.5 * (hi - lo);
                SummandMoments { a, b2: a * a + h * h / 3.0, c2: h * h / 3.0, d3: h * h * h / 4.0 }
            }
            SummandFamily::FinitePmf(pmf) => {
                if pmf.tail_defect() > 1e-12 {
                    return Err(Error::InvalidParameter("summand pmf must not be truncated".into()));
                }
                let a = pmf.mean();
                SummandMoments {
                    a,
                    b2: pmf.expect(|x| x * x),
                    c2: pmf.expect(|x| (x - a) * (x - a)),
                    d3: pmf.expect(|x| (x - a).abs().powi(3)),
                }
            }
        };
        Ok(Self { family, moments })
    }

    pub fn constant(v: f64) -> Result<Self> {
        Self::new(SummandFamily::Constant(v))
    }
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(SummandFamily::Bernoulli(p))
    }
    pub fn two_point(x0: f64, x1: f64, p: f64) -> Result<Self> {
        Self::new(SummandFamily::TwoPoint { x0, x1, p })
    }
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(SummandFamily::Exponential { rate })
    }
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(SummandFamily::Uniform { lo, hi })
    }
    pub fn finite(pmf: DiscretePmf) -> Result<Self> {
        Self::new(SummandFamily::FinitePmf(pmf))
    }

    pub fn family(&self) -> &SummandFamily {
        &self.family
    }

    pub fn moments(&self) -> SummandMoments {
        self.moments
    }

    /// The law as a pmf when it has finite support.
    pub fn finite_pmf(&self) -> Option<DiscretePmf> {
        match &self.family {
            SummandFamily::Constant(v) => Some(DiscretePmf::point_mass(*v)),
            SummandFamily::Bernoulli(p) => DiscretePmf::from_weights([(0.0, 1.0 - p), (1.0, *p)], 0.0).ok(),
            SummandFamily::TwoPoint { x0, x1, p } => DiscretePmf::from_weights([(*x0, 1.0 - p), (*x1, *p)], 0.0).ok(),
            SummandFamily::FinitePmf(pmf) => Some(pmf.clone()),
            _ => None,
        }
    }

    /// A reusable sampler for this law.
    pub fn sampler(&self) -> SummandSampler {
        let kind = match &self.family {
            SummandFamily::Constant(v) => SamplerKind::Constant(*v),
            SummandFamily::Bernoulli(p) => SamplerKind::TwoPoint { x0: 0.0, x1: 1.0, p: *p },
            SummandFamily::TwoPoint { x0, x1, p } => SamplerKind::TwoPoint { x0: *x0, x1: *x1, p: *p },
            SummandFamily::Exponential { rate } => {
                SamplerKind::Exponential { rate: *rate, exp: Exp::new(*rate).expect("validated rate") }
            }
            SummandFamily::Uniform { lo, hi } => SamplerKind::Uniform { lo: *lo, hi: *hi },
            SummandFamily::FinitePmf(pmf) => SamplerKind::Table(PmfSampler::new(pmf)),
        };
        SummandSampler { kind }
    }

    /// `count` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let s = self.sampler();
        (0..count).map(|_| s.sample(rng)).collect()
    }
}

impl fmt::Display for SummandFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummandFamily::Constant(v) => write!(f, "const:v={v}"),
            SummandFamily::Bernoulli(p) => write!(f, "bern:p={p}"),
            SummandFamily::TwoPoint { x0, x1, p } => write!(f, "twopoint:x0={x0},x1={x1},p={p}"),
            SummandFamily::Exponential { rate } => write!(f, "exp:rate={rate}"),
            SummandFamily::Uniform { lo, hi } => write!(f, "uniform:lo={lo},hi={hi}"),
            SummandFamily::FinitePmf(p) => write!(f, "pmf:[{} atoms]", p.len()),
        }
    }
}

impl fmt::Display for SummandModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Constant(f64),
    TwoPoint { x0: f64, x1: f64, p: f64 },
    Exponential { rate: f64, exp: Exp<f64> },
    Uniform { lo: f64, hi: f64 },
    Table(PmfSampler),
}

/// Sampler for single summands and for whole partial sums.
#[derive(Debug, Clone)]
pub struct SummandSampler {
    kind: SamplerKind,
}

impl SummandSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SamplerKind::Constant(v) => *v,
            SamplerKind::TwoPoint { x0, x1, p } => {
                if rng.random::<f64>() < *p {
                    *x1
                } else {
                    *x0
                }
            }
            SamplerKind::Exponential { exp, .. } => exp.sample(rng),
            SamplerKind::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            SamplerKind::Table(t) => t.sample(rng),
        }
    }

    /// A draw of X_1 + ... + X_n, exact in law. Two-point and exponential
    /// laws use their closed-form sum distributions (binomial, gamma).
    pub fn sample_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match &self.kind {
            SamplerKind::Constant(v) => n as f64 * v,
            SamplerKind::TwoPoint { x0, x1, p } => {
                let k = Binomial::new(n, *p).expect("validated p").sample(rng) as f64;
                n as f64 * x0 + (x1 - x0) * k
            }
            SamplerKind::Exponential { rate, .. } => {
                Gamma::new(n as f64, 1.0 / rate).expect("positive shape").sample(rng)
            }
            _ => (0..n).map(|_| self.sample(rng)).sum(),
        }
    }
}
