use super::{run_chunks, DEFAULT_CHUNK};
use crate::biasing::{make_coupling, size_bias_pmf, zero_bias_density, CouplingKind, NonZeroBias, SizeBiasCoupling};
use crate::bounds::BoundConstants;
use crate::error::{Error, Result};
use crate::metrics::exact_total_variation;
use crate::models::{IndexModel, ModelMoments, SummandModel, DEFAULT_TAIL_TOL};
use crate::pmf::DiscretePmf;
use crate::rng::RandomStream;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Smooth test functions with known derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    Linear,
    Square,
    Cube,
    Sin,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] =
        [TestFunction::Linear, TestFunction::Square, TestFunction::Cube, TestFunction::Sin];

    pub fn value(self, x: f64) -> f64 {
        match self {
            Self::Linear => x,
            Self::Square => x * x,
            Self::Cube => x * x * x,
            Self::Sin => x.sin(),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Linear => 1.0,
            Self::Square => 2.0 * x,
            Self::Cube => 3.0 * x * x,
            Self::Sin => x.cos(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "x",
            Self::Square => "x2",
            Self::Cube => "x3",
            Self::Sin => "sin",
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown test function '{s}' (x, x2, x3, sin)")))
    }
}

/// Which distributional identity to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityKind {
    /// E[N h(N)] = E[N] E[h(N^s)] for the index.
    Size,
    /// E[Y f(Y)] = Var(X) E[f'(Y*)] for the centered summand Y = X - a.
    Zero,
    /// E[W f(W)] = E[f'(W*)] for the standardized sum with centered summands.
    Wstar,
}

impl FromStr for IdentityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "size" => Ok(Self::Size),
            "zero" => Ok(Self::Zero),
            "wstar" => Ok(Self::Wstar),
            _ => Err(Error::Parse(format!("unknown identity '{s}' (size, zero, wstar)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum IdentityMode {
    Exact,
    MonteCarlo { reps: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub kind: IdentityKind,
    pub function: TestFunction,
    pub mode: IdentityMode,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Zero in exact mode.
    pub std_error: f64,
    pub pass: bool,
}

const EXACT_TOL: f64 = 1e-10;

/// Running sums of paired draws (lhs, rhs).
#[derive(Debug, Clone, Copy, Default)]
struct Paired {
    n: u64,
    lhs: f64,
    rhs: f64,
    diff: f64,
    diff2: f64,
}

impl Paired {
    fn push(&mut self, l: f64, r: f64) {
        self.n += 1;
        self.lhs += l;
        self.rhs += r;
        self.diff += l - r;
        self.diff2 += (l - r) * (l - r);
    }

    fn merge(parts: Vec<Paired>) -> Paired {
        parts.into_iter().fold(Paired::default(), |a, b| Paired {
            n: a.n + b.n,
            lhs: a.lhs + b.lhs,
            rhs: a.rhs + b.rhs,
            diff: a.diff + b.diff,
            diff2: a.diff2 + b.diff2,
        })
    }

    fn residual(self, kind: IdentityKind, function: TestFunction, mode: IdentityMode) -> IdentityResidual {
        let n = self.n as f64;
        let mean = self.diff / n;
        let var = ((self.diff2 - n * mean * mean) / (n - 1.0)).max(0.0);
        let std_error = (var / n).sqrt();
        let (lhs, rhs) = (self.lhs / n, self.rhs / n);
        let residual = (lhs - rhs).abs();
        let pass = residual <= 4.0 * std_error || residual <= EXACT_TOL * lhs.abs().max(1.0);
        IdentityResidual { kind, function, mode, lhs, rhs, residual, std_error, pass }
    }
}

fn paired_mc<F>(reps: u64, seed: u64, purpose: &str, draw: F) -> Result<Paired>
where
    F: Fn(&mut RandomStream) -> Result<(f64, f64)> + Sync + Send,
{
    if reps < 2 {
        return Err(Error::InvalidParameter("need at least two replications".into()));
    }
    let parts = run_chunks(reps, DEFAULT_CHUNK, 0, |i, n| {
        let mut stream = RandomStream::for_purpose(seed, purpose, i);
        let mut acc = Paired::default();
        for _ in 0..n {
            let (l, r) = draw(&mut stream)?;
            acc.push(l, r);
        }
        Ok(acc)
    })?;
    Ok(Paired::merge(parts))
}

fn exact_residual(kind: IdentityKind, function: TestFunction, lhs: f64, rhs: f64) -> IdentityResidual {
    let residual = (lhs - rhs).abs();
    IdentityResidual {
        kind,
        function,
        mode: IdentityMode::Exact,
        lhs,
        rhs,
        residual,
        std_error: 0.0,
        pass: residual <= EXACT_TOL * lhs.abs().max(1.0),
    }
}

/// Checks a size-bias, zero-bias or W-zero-bias identity for one test
/// function. Monte Carlo residuals pass within four standard errors of the
/// paired difference; exact residuals within 1e-10.
pub fn verify_bias_identity(
    kind: IdentityKind,
    index: &IndexModel,
    summand: &SummandModel,
    function: TestFunction,
    mode: IdentityMode,
) -> Result<IdentityResidual> {
    let f = function;
    match (kind, mode) {
        (IdentityKind::Size, IdentityMode::Exact) => {
            let pmf = index.materialize_pmf(DEFAULT_TAIL_TOL)?;
            let sb = size_bias_pmf(&pmf)?;
            let lhs = pmf.expect(|n| n * f.value(n));
            let rhs = index.moments().alpha * sb.expect(|n| f.value(n));
            Ok(exact_residual(kind, f, lhs, rhs))
        }
        (IdentityKind::Size, IdentityMode::MonteCarlo { reps, seed }) => {
            let coupling = make_coupling(index, CouplingKind::default_for(index))?;
            let alpha = index.moments().alpha;
            let acc = paired_mc(reps, seed, "size-identity", |rng| {
                let (n, ns) = coupling.sample_pair(rng);
                Ok((n as f64 * f.value(n as f64), alpha * f.value(ns as f64)))
            })?;
            Ok(acc.residual(kind, f, mode))
        }
        (IdentityKind::Zero, IdentityMode::Exact) => {
            let m = summand.moments();
            let pmf = summand
                .finite_pmf()
                .ok_or_else(|| Error::ExactUnavailable(format!("summand {summand} has no finite pmf")))?;
            let centered = pmf.shifted(-m.a);
            let density = zero_bias_density(&centered)?;
            let lhs = centered.expect(|y| y * f.value(y));
            let rhs = m.c2 * density.expect_derivative(|y| f.value(y));
            Ok(exact_residual(kind, f, lhs, rhs))
        }
        (IdentityKind::Zero, IdentityMode::MonteCarlo { reps, seed }) => {
            let m = summand.moments();
            let nz = NonZeroBias::new(summand)?;
            let xs = summand.sampler();
            let acc = paired_mc(reps, seed, "zero-identity", |rng| {
                let y = xs.sample(rng) - m.a;
                let ystar = nz.sample(rng) - m.a;
                Ok((y * f.value(y), m.c2 * f.derivative(ystar)))
            })?;
            Ok(acc.residual(kind, f, mode))
        }
        (IdentityKind::Wstar, IdentityMode::Exact) => {
            Err(Error::ExactUnavailable("the W-zero-bias identity is checked by simulation".into()))
        }
        (IdentityKind::Wstar, IdentityMode::MonteCarlo { reps, seed }) => {
            let m = ModelMoments::new(index, summand)?;
            let scale = m.summand.b2.sqrt();
            if m.summand.a.abs() > 1e-12 * scale {
                return Err(Error::NonzeroMean(m.summand.a));
            }
            let sigma = m.sum.sigma();
            let coupling = make_coupling(index, CouplingKind::Quantile)?;
            let nz = NonZeroBias::new(summand)?;
            let xs = summand.sampler();
            let acc = paired_mc(reps, seed, "wstar-identity", |rng| {
                let (n, ms) = coupling.sample_pair(rng);
                if ms < n {
                    return Err(Error::InvalidParameter(format!("coupling drew M={ms} < N={n}")));
                }
                let x1 = xs.sample(rng);
                let (s_n, s_m) = if n == 0 {
                    (0.0, x1 + xs.sample_sum(ms - 1, rng))
                } else {
                    let s_n = x1 + xs.sample_sum(n - 1, rng);
                    (s_n, s_n + xs.sample_sum(ms - n, rng))
                };
                let w = s_n / sigma;
                let wstar = (s_m - x1 + nz.sample(rng)) / sigma;
                Ok((w * f.value(w), f.derivative(wstar)))
            })?;
            Ok(acc.residual(kind, f, mode))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub n: u64,
    pub t: f64,
    pub u: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub bound: f64,
    pub pass: bool,
}

/// sigma (u - t) / (c sqrt(2 pi n)) + 2 C_K d^3 / (c^3 sqrt(n)).
pub fn concentration_bound(m: &ModelMoments, n: u64, t: f64, u: f64, constants: &BoundConstants) -> f64 {
    let (c, nf) = (m.summand.c(), n as f64);
    m.sum.sigma() * (u - t) / (c * (2.0 * PI * nf).sqrt()) + constants.two_ck() * m.summand.d3 / (c.powi(3) * nf.sqrt())
}

/// Empirical P(t < W_n <= u) with W_n = (S_n - alpha a) / sigma, where alpha
/// and sigma come from `index`, against the concentration bound.
#[allow(clippy::too_many_arguments)]
pub fn concentration_check(
    index: &IndexModel,
    n: u64,
    summand: &SummandModel,
    t: f64,
    u: f64,
    reps: u64,
    seed: u64,
    constants: &BoundConstants,
) -> Result<ConcentrationReport> {
    if n == 0 || !(t < u) {
        return Err(Error::InvalidParameter("need n >= 1 and t < u".into()));
    }
    let m = ModelMoments::new(index, summand)?;
    if !(m.summand.c2 > 0.0) {
        return Err(Error::DegenerateSum);
    }
    if reps < 2 {
        return Err(Error::InvalidParameter("need at least two replications".into()));
    }
    let (mu, sigma) = (m.sum.mu, m.sum.sigma());
    let xs = summand.sampler();
    let hits = run_chunks(reps, DEFAULT_CHUNK, 0, |i, count| {
        let mut stream = RandomStream::for_purpose(seed, "concentration", i);
        Ok((0..count)
            .filter(|_| {
                let w = (xs.sample_sum(n, &mut stream) - mu) / sigma;
                t < w && w <= u
            })
            .count() as u64)
    })?;
    let p = hits.iter().sum::<u64>() as f64 / reps as f64;
    let std_error = (p * (1.0 - p) / reps as f64).sqrt();
    let bound = concentration_bound(&m, n, t, u, constants);
    Ok(ConcentrationReport { n, t, u, empirical: p, std_error, bound, pass: p - 4.0 * std_error <= bound })
}

/// Sampled marginals of a coupling against the exact laws of N and N^s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalCheck {
    pub kind: CouplingKind,
    pub reps: u64,
    pub tv_n: f64,
    pub tv_ns: f64,
    /// Expected total variation from sampling noise alone.
    pub mc_error_n: f64,
    pub mc_error_ns: f64,
    pub pass: bool,
}

fn noise_tv(pmf: &DiscretePmf, reps: u64) -> f64 {
    0.5 * pmf.probs().iter().map(|p| (2.0 * p * (1.0 - p) / (PI * reps as f64)).sqrt()).sum::<f64>()
}

/// Passes when both total variation distances are within three times
/// their sampling-noise scale.
pub fn coupling_marginal_check(coupling: &SizeBiasCoupling, reps: u64, seed: u64) -> Result<MarginalCheck> {
    if reps < 2 {
        return Err(Error::InvalidParameter("need at least two replications".into()));
    }
    let parts = run_chunks(reps, DEFAULT_CHUNK, 0, |i, count| {
        let mut stream = RandomStream::for_purpose(seed, "marginal", i);
        let mut cn: BTreeMap<u64, u64> = BTreeMap::new();
        let mut cs: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..count {
            let (n, ns) = coupling.sample_pair(&mut stream);
            *cn.entry(n).or_default() += 1;
            *cs.entry(ns).or_default() += 1;
        }
        Ok((cn, cs))
    })?;
    let (mut cn, mut cs) = (BTreeMap::<u64, u64>::new(), BTreeMap::<u64, u64>::new());
    for (a, b) in parts {
        a.into_iter().for_each(|(k, v)| *cn.entry(k).or_default() += v);
        b.into_iter().for_each(|(k, v)| *cs.entry(k).or_default() += v);
    }
    let empirical = |c: BTreeMap<u64, u64>| {
        DiscretePmf::from_weights(c.into_iter().map(|(k, v)| (k as f64, v as f64 / reps as f64)), 0.0)
    };
    let exact_n = match coupling.joint() {
        Some(j) => j.marginal_n()?,
        None => coupling.index().materialize_pmf(DEFAULT_TAIL_TOL)?,
    };
    let exact_ns = size_bias_pmf(&exact_n)?;
    let tv_n = exact_total_variation(&empirical(cn)?, &exact_n);
    let tv_ns = exact_total_variation(&empirical(cs)?, &exact_ns);
    let (mc_error_n, mc_error_ns) = (noise_tv(&exact_n, reps), noise_tv(&exact_ns, reps));
    Ok(MarginalCheck {
        kind: coupling.kind(),
        reps,
        tv_n,
        tv_ns,
        mc_error_n,
        mc_error_ns,
        pass: tv_n <= 3.0 * mc_error_n && tv_ns <= 3.0 * mc_error_ns,
    })
}
