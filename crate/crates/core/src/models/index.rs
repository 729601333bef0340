use crate::error::{Error, Result};
use crate::pmf::{DiscretePmf, PmfSampler};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Hypergeometric, Poisson};
use serde::Serialize;
use std::fmt;

/// Default truncation tolerance for infinite-support laws.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Largest support a materialized pmf may have.
pub const MAX_SUPPORT: usize = 100_000;

/// Law of the random index N on the nonnegative integers.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexFamily {
    Dirac(u64),
    Poisson(f64),
    Binomial {
        n: u64,
        p: f64,
    },
    /// Number of red balls when drawing `n` without replacement from an urn
    /// with `r` red and `s` white balls.
    Hypergeometric {
        n: u64,
        r: u64,
        s: u64,
    },
    /// Failures before the `r`-th success, success probability `q`.
    NegativeBinomial {
        r: f64,
        q: f64,
    },
    /// Sum of `copies` independent copies of `base`.
    Convolution {
        base: Box<IndexModel>,
        copies: u64,
    },
    FinitePmf(DiscretePmf),
}

/// Mean, second moment, variance and third raw moment of N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexMoments {
    pub alpha: f64,
    pub beta2: f64,
    pub gamma2: f64,
    pub delta3: f64,
}

impl IndexMoments {
    pub fn gamma(&self) -> f64 {
        self.gamma2.sqrt()
    }

    fn from_cumulants(k1: f64, k2: f64, k3: f64) -> Self {
        let beta2 = k2 + k1 * k1;
        Self { alpha: k1, beta2, gamma2: k2, delta3: k3 + 3.0 * k1 * k2 + k1 * k1 * k1 }
    }

    fn from_factorial(f1: f64, f2: f64, f3: f64, gamma2: f64) -> Self {
        Self { alpha: f1, beta2: gamma2 + f1 * f1, gamma2, delta3: f3 + 3.0 * f2 + f1 }
    }

    /// Third central moment E[(N - alpha)^3].
    pub fn third_central(&self) -> f64 {
        self.delta3 - 3.0 * self.alpha * self.beta2 + 2.0 * self.alpha.powi(3)
    }
}

/// Index law with cached moments.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexModel {
    family: IndexFamily,
    moments: IndexMoments,
}

/// Pmf functionals of N used by the Kolmogorov bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexFunctionals {
    /// P(N = 0)
    pub p_n0: f64,
    /// E[1{N>=1} / N]
    pub e_ninv: f64,
    /// E[1{N>=1} / sqrt(N)]
    pub e_ninvhalf: f64,
    /// E|N - alpha|
    pub mean_abs_dev: f64,
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")))
    }
}

fn rising(r: f64, k: u32) -> f64 {
    (0..k).map(|j| r + j as f64).product()
}

fn falling(n: f64, k: u32) -> f64 {
    (0..k).map(|j| n - j as f64).product()
}

impl IndexModel {
    pub fn new(family: IndexFamily) -> Result<Self> {
        let moments = match &family {
            IndexFamily::Dirac(n) => {
                let n = *n as f64;
                IndexMoments { alpha: n, beta2: n * n, gamma2: 0.0, delta3: n * n * n }
            }
            IndexFamily::Poisson(l) => {
                if !(l.is_finite() && *l > 0.0) {
                    return Err(Error::InvalidParameter("lambda must be positive".into()));
                }
                let l = *l;
                IndexMoments { alpha: l, beta2: l + l * l, gamma2: l, delta3: l * l * l + 3.0 * l * l + l }
            }
            IndexFamily::Binomial { n, p } => {
                check_prob(*p)?;
                let nf = *n as f64;
                let (f1, f2, f3) = (nf * p, falling(nf, 2) * p * p, falling(nf, 3) * p.powi(3));
                IndexMoments::from_factorial(f1, f2, f3, nf * p * (1.0 - p))
            }
            IndexFamily::Hypergeometric { n, r, s } => {
                if n > &(r + s) {
                    return Err(Error::InvalidParameter("hypergeometric needs n <= r + s".into()));
                }
                let (nf, rf, tf) = (*n as f64, *r as f64, (r + s) as f64);
                let fm = |k: u32| {
                    if k as f64 > tf {
                        0.0
                    } else {
                        falling(nf, k) * falling(rf, k) / falling(tf, k)
                    }
                };
                let gamma2 = if r + s <= 1 { 0.0 } else { nf * rf / tf * (*s as f64) * (tf - nf) / (tf * (tf - 1.0)) };
                IndexMoments::from_factorial(fm(1), fm(2), fm(3), gamma2)
            }
            IndexFamily::NegativeBinomial { r, q } => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(Error::InvalidParameter("negbin r must be positive".into()));
                }
                if !(*q > 0.0 && *q <= 1.0) {
                    return Err(Error::InvalidParameter("negbin q must lie in (0, 1]".into()));
                }
                let m = (1.0 - q) / q;
                let (f1, f2, f3) = (r * m, rising(*r, 2) * m * m, rising(*r, 3) * m.powi(3));
                IndexMoments::from_factorial(f1, f2, f3, r * m / q)
            }
            IndexFamily::Convolution { base, copies } => {
                if *copies == 0 {
                    return Err(Error::InvalidParameter("convolution needs at least one copy".into()));
                }
                let b = base.moments;
                let m = *copies as f64;
                IndexMoments::from_cumulants(m * b.alpha, m * b.gamma2, m * b.third_central())
            }
            IndexFamily::FinitePmf(pmf) => {
                if !pmf.is_integer_valued() {
                    return Err(Error::InvalidParameter("index pmf must live on the nonnegative integers".into()));
                }
                if pmf.tail_defect() > 1e-12 {
                    return Err(Error::InvalidParameter("index pmf tail defect exceeds 1e-12".into()));
                }
                let alpha = pmf.mean();
                IndexMoments {
                    alpha,
                    beta2: pmf.expect(|x| x * x),
                    gamma2: pmf.expect(|x| (x - alpha) * (x - alpha)),
                    delta3: pmf.expect(|x| x * x * x),
                }
            }
        };
        Ok(Self { family, moments })
    }

    pub fn dirac(n: u64) -> Result<Self> {
        Self::new(IndexFamily::Dirac(n))
    }
    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new(IndexFamily::Poisson(lambda))
    }
    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        Self::new(IndexFamily::Binomial { n, p })
    }
    pub fn hypergeometric(n: u64, r: u64, s: u64) -> Result<Self> {
        Self::new(IndexFamily::Hypergeometric { n, r, s })
    }
    pub fn negative_binomial(r: f64, q: f64) -> Result<Self> {
        Self::new(IndexFamily::NegativeBinomial { r, q })
    }
    pub fn convolution(base: IndexModel, copies: u64) -> Result<Self> {
        Self::new(IndexFamily::Convolution { base: Box::new(base), copies })
    }
    pub fn finite(pmf: DiscretePmf) -> Result<Self> {
        Self::new(IndexFamily::FinitePmf(pmf))
    }

    pub fn family(&self) -> &IndexFamily {
        &self.family
    }

    pub fn moments(&self) -> IndexMoments {
        self.moments
    }

    /// Finite pmf with certified tail defect at most `tail_tol`.
    pub fn materialize_pmf(&self, tail_tol: f64) -> Result<DiscretePmf> {
        if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
            return Err(Error::InvalidParameter("tail_tol must lie in (0, 1e-6]".into()));
        }
        match &self.family {
            IndexFamily::Dirac(n) => Ok(DiscretePmf::point_mass(*n as f64)),
            IndexFamily::Poisson(l) => {
                let l = *l;
                let ratio = move |k: u64| l / (k as f64 + 1.0);
                unimodal(l.floor() as u64, None, tail_tol, ratio, ratio)
            }
            IndexFamily::Binomial { n, p } => {
                let (n, p) = (*n, *p);
                if p == 0.0 {
                    return Ok(DiscretePmf::point_mass(0.0));
                }
                if p == 1.0 {
                    return Ok(DiscretePmf::point_mass(n as f64));
                }
                let odds = p / (1.0 - p);
                let mode = (((n + 1) as f64) * p).floor().min(n as f64) as u64;
                let ratio = move |k: u64| (n - k) as f64 / (k as f64 + 1.0) * odds;
                unimodal(mode, Some(n), tail_tol, ratio, ratio)
            }
            IndexFamily::Hypergeometric { n, r, s } => hyper_pmf(*n, *r, *s, tail_tol),
            IndexFamily::NegativeBinomial { r, q } => {
                let (r, q) = (*r, *q);
                if q == 1.0 {
                    return Ok(DiscretePmf::point_mass(0.0));
                }
                let mode = if r > 1.0 { ((r - 1.0) * (1.0 - q) / q).floor() as u64 } else { 0 };
                unimodal(
                    mode,
                    None,
                    tail_tol,
                    move |k| (k as f64 + r) / (k as f64 + 1.0) * (1.0 - q),
                    move |k| (1.0 - q) * ((k as f64 + r) / (k as f64 + 1.0)).max(1.0),
                )
            }
            IndexFamily::Convolution { base, copies } => {
                let b = base.materialize_pmf(tail_tol / *copies as f64)?;
                convolve_power(&b, *copies)
            }
            IndexFamily::FinitePmf(pmf) => Ok(pmf.clone()),
        }
    }

    /// P(N=0), E[1/N; N>=1], E[N^{-1/2}; N>=1] and E|N - alpha| from the
    /// materialized pmf.
    pub fn functionals(&self) -> Result<IndexFunctionals> {
        let pmf = self.materialize_pmf(DEFAULT_TAIL_TOL)?;
        let alpha = self.moments.alpha;
        Ok(IndexFunctionals {
            p_n0: pmf.prob_at(0.0),
            e_ninv: pmf.expect(|k| if k >= 1.0 { 1.0 / k } else { 0.0 }),
            e_ninvhalf: pmf.expect(|k| if k >= 1.0 { 1.0 / k.sqrt() } else { 0.0 }),
            mean_abs_dev: pmf.expect(|k| (k - alpha).abs()),
        })
    }

    pub fn sampler(&self) -> IndexSampler {
        let kind = match &self.family {
            IndexFamily::Dirac(n) => IndexSamplerKind::Dirac(*n),
            IndexFamily::Poisson(l) => IndexSamplerKind::Poisson(Poisson::new(*l).expect("validated")),
            IndexFamily::Binomial { n, p } => IndexSamplerKind::Binomial(Binomial::new(*n, *p).expect("validated")),
            IndexFamily::Hypergeometric { n, r, s } => {
                IndexSamplerKind::Hyper(Hypergeometric::new(r + s, *r, *n).expect("validated"))
            }
            IndexFamily::NegativeBinomial { r, q } => {
                if *q == 1.0 {
                    IndexSamplerKind::Dirac(0)
                } else {
                    IndexSamplerKind::GammaPoisson(Gamma::new(*r, (1.0 - q) / q).expect("validated"))
                }
            }
            IndexFamily::Convolution { base, copies } => {
                IndexSamplerKind::Convolution(Box::new(base.sampler()), *copies)
            }
            IndexFamily::FinitePmf(pmf) => IndexSamplerKind::Table(PmfSampler::new(pmf)),
        };
        IndexSampler { kind }
    }

    /// `count` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<u64> {
        let s = self.sampler();
        (0..count).map(|_| s.sample(rng)).collect()
    }
}

impl fmt::Display for IndexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexFamily::Dirac(n) => write!(f, "dirac:n={n}"),
            IndexFamily::Poisson(l) => write!(f, "poisson:lambda={l}"),
            IndexFamily::Binomial { n, p } => write!(f, "binomial:n={n},p={p}"),
            IndexFamily::Hypergeometric { n, r, s } => write!(f, "hyper:n={n},r={r},s={s}"),
            IndexFamily::NegativeBinomial { r, q } => write!(f, "negbin:r={r},q={q}"),
            IndexFamily::Convolution { base, copies } => write!(f, "conv:copies={copies},base={base}"),
            IndexFamily::FinitePmf(p) => write!(f, "pmf:[{} atoms]", p.len()),
        }
    }
}

impl fmt::Display for IndexModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

#[derive(Debug, Clone)]
enum IndexSamplerKind {
    Dirac(u64),
    Poisson(Poisson<f64>),
    Binomial(Binomial),
    Hyper(Hypergeometric),
    GammaPoisson(Gamma<f64>),
    Convolution(Box<IndexSampler>, u64),
    Table(PmfSampler),
}

#[derive(Debug, Clone)]
pub struct IndexSampler {
    kind: IndexSamplerKind,
}

impl IndexSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.kind {
            IndexSamplerKind::Dirac(n) => *n,
            IndexSamplerKind::Poisson(p) => p.sample(rng) as u64,
            IndexSamplerKind::Binomial(b) => b.sample(rng),
            IndexSamplerKind::Hyper(h) => h.sample(rng),
            IndexSamplerKind::GammaPoisson(g) => {
                let l = g.sample(rng);
                if l <= 0.0 {
                    0
                } else {
                    Poisson::new(l).expect("positive rate").sample(rng) as u64
                }
            }
            IndexSamplerKind::Convolution(b, m) => (0..*m).map(|_| b.sample(rng)).sum(),
            IndexSamplerKind::Table(t) => t.sample(rng) as u64,
        }
    }
}

/// Pmf of a unimodal law on the integers, built outward from `mode` by
/// probability ratios and normalized at the end.
///
/// `ratio(k)` is p(k+1)/p(k). `tail_ratio(k)` must bound p(j+1)/p(j) for all
/// j >= k; it certifies the upper tail. The lower tail is certified with the
/// log-concave bound (ratios shrink moving away from the mode) or by simply
/// reaching zero.
fn unimodal(
    mode: u64,
    upper: Option<u64>,
    tail_tol: f64,
    ratio: impl Fn(u64) -> f64,
    tail_ratio: impl Fn(u64) -> f64,
) -> Result<DiscretePmf> {
    // run the tails well past tail_tol so that normalization is accurate
    let cutoff = 0.25 * tail_tol.min(1e-17);
    let mut up = vec![1.0f64];
    let mut mass = 1.0;
    let mut defect = 0.0;
    let mut k = mode;
    while Some(k) != upper {
        let pk = *up.last().unwrap();
        let rho = tail_ratio(k);
        if rho < 1.0 && pk * rho / (1.0 - rho) <= cutoff * mass {
            defect += pk * rho / (1.0 - rho);
            break;
        }
        let next = pk * ratio(k);
        up.push(next);
        mass += next;
        k += 1;
        if up.len() > MAX_SUPPORT {
            return Err(Error::UnboundedSupport("upper tail needs more than 1e5 atoms".into()));
        }
    }
    let mut down: Vec<f64> = Vec::new();
    let mut k = mode;
    let mut pk = 1.0;
    while k > 0 {
        // p(k-2)/p(k-1) <= p(k-1)/p(k) for log-concave laws
        let back = 1.0 / ratio(k - 1);
        if back < 1.0 && pk * back / (1.0 - back) <= cutoff * mass {
            defect += pk * back / (1.0 - back);
            break;
        }
        pk *= back;
        down.push(pk);
        mass += pk;
        k -= 1;
        if down.len() > MAX_SUPPORT {
            return Err(Error::UnboundedSupport("lower tail needs more than 1e5 atoms".into()));
        }
    }
    let lo = mode - down.len() as u64;
    let mut probs: Vec<f64> = down.into_iter().rev().collect();
    probs.extend(up);
    let total: f64 = probs.iter().sum::<f64>() + defect;
    probs.iter_mut().for_each(|p| *p /= total);
    let support = (0..probs.len()).map(|i| (lo + i as u64) as f64).collect();
    DiscretePmf::new(support, probs, defect / total)
}

fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Exact hypergeometric pmf as rationals.
pub fn hyper_pmf_exact(n: u64, r: u64, s: u64) -> Vec<(u64, BigRational)> {
    let total = big_binomial(r + s, n);
    let lo = n.saturating_sub(s);
    let hi = n.min(r);
    (lo..=hi).map(|k| (k, BigRational::new(big_binomial(r, k) * big_binomial(s, n - k), total.clone()))).collect()
}

fn hyper_pmf(n: u64, r: u64, s: u64, tail_tol: f64) -> Result<DiscretePmf> {
    if r + s <= 200 {
        let exact = hyper_pmf_exact(n, r, s);
        let support = exact.iter().map(|(k, _)| *k as f64).collect();
        let probs = exact.iter().map(|(_, p)| p.to_f64().unwrap_or(0.0)).collect();
        return DiscretePmf::new(support, probs, 0.0).or_else(|_| {
            let pairs: Vec<(f64, f64)> = exact.iter().map(|(k, p)| (*k as f64, p.to_f64().unwrap_or(0.0))).collect();
            DiscretePmf::from_weights(pairs, 0.0)
        });
    }
    let lo = n.saturating_sub(s);
    let hi = n.min(r);
    let mode = ((((n + 1) * (r + 1)) as f64) / ((r + s + 2) as f64)).floor() as u64;
    let mode = mode.clamp(lo, hi);
    let (nf, rf, sf) = (n as f64, r as f64, s as f64);
    let ratio = move |k: u64| {
        let k = k as f64;
        (rf - k) * (nf - k) / ((k + 1.0) * (sf - nf + k + 1.0))
    };
    let shifted = move |j: u64| ratio(j + lo);
    let pmf = unimodal(mode - lo, Some(hi - lo), tail_tol, shifted, shifted)?;
    Ok(pmf.shifted(lo as f64))
}

fn convolve(a: &DiscretePmf, b: &DiscretePmf) -> Result<DiscretePmf> {
    let a0 = a.support()[0] as u64;
    let b0 = b.support()[0] as u64;
    let alen = *a.support().last().unwrap() as u64 - a0 + 1;
    let blen = *b.support().last().unwrap() as u64 - b0 + 1;
    let len = (alen + blen - 1) as usize;
    if len > MAX_SUPPORT {
        return Err(Error::UnboundedSupport("convolution support exceeds 1e5 atoms".into()));
    }
    let mut out = vec![0.0f64; len];
    for (x, p) in a.iter() {
        for (y, q) in b.iter() {
            out[(x as u64 - a0 + y as u64 - b0) as usize] += p * q;
        }
    }
    let pairs = out.into_iter().enumerate().map(|(i, p)| ((a0 + b0 + i as u64) as f64, p));
    let defect = (a.tail_defect() + b.tail_defect()).min(1e-6);
    DiscretePmf::from_weights(pairs, defect)
}

fn convolve_power(base: &DiscretePmf, copies: u64) -> Result<DiscretePmf> {
    let mut result: Option<DiscretePmf> = None;
    let mut power = base.clone();
    let mut m = copies;
    loop {
        if m & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(r) => convolve(&r, &power)?,
            });
        }
        m >>= 1;
        if m == 0 {
            break;
        }
        power = convolve(&power, &power)?;
    }
    Ok(result.expect("copies >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn pmf_moments(p: &DiscretePmf) -> (f64, f64, f64, f64) {
        let a = p.mean();
        (a, p.expect(|x| x * x), p.expect(|x| (x - a).powi(2)), p.expect(|x| x.powi(3)))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn closed_forms() {
        let m = IndexModel::dirac(5).unwrap().moments();
        assert_eq!((m.alpha, m.beta2, m.gamma2, m.delta3), (5.0, 25.0, 0.0, 125.0));
        let m = IndexModel::poisson(2.0).unwrap().moments();
        assert_eq!((m.alpha, m.beta2, m.gamma2, m.delta3), (2.0, 6.0, 2.0, 22.0));
        let m = IndexModel::hypergeometric(5, 10, 10).unwrap().moments();
        assert!((m.alpha - 2.5).abs() < 1e-15);
        assert!((m.gamma2 - 75.0 / 76.0).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_pmf_summation() {
        let models = vec![
            IndexModel::dirac(3).unwrap(),
            IndexModel::poisson(2.0).unwrap(),
            IndexModel::poisson(350.0).unwrap(),
            IndexModel::binomial(20, 0.3).unwrap(),
            IndexModel::binomial(400, 0.1).unwrap(),
            IndexModel::hypergeometric(5, 10, 10).unwrap(),
            IndexModel::hypergeometric(20, 100, 300).unwrap(),
            IndexModel::hypergeometric(150, 400, 500).unwrap(),
            IndexModel::negative_binomial(5.0, 0.4).unwrap(),
            IndexModel::negative_binomial(0.5, 0.3).unwrap(),
            IndexModel::convolution(IndexModel::poisson(2.0).unwrap(), 3).unwrap(),
            IndexModel::convolution(IndexModel::binomial(4, 0.25).unwrap(), 5).unwrap(),
        ];
        for m in models {
            let pmf = m.materialize_pmf(1e-12).unwrap();
            let (a, b2, g2, d3) = pmf_moments(&pmf);
            let e = m.moments();
            assert!(rel(a, e.alpha) < 1e-9, "{m}: alpha {a} vs {}", e.alpha);
            assert!(rel(b2, e.beta2) < 1e-9, "{m}");
            assert!(rel(g2, e.gamma2) < 1e-9 || e.gamma2 == 0.0, "{m}: gamma2 {g2} vs {}", e.gamma2);
            assert!(rel(d3, e.delta3) < 1e-9, "{m}");
            let total: f64 = pmf.probs().iter().sum::<f64>() + pmf.tail_defect();
            assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn binomial_pmf_is_exact() {
        let pmf = IndexModel::binomial(4, 0.5).unwrap().materialize_pmf(1e-12).unwrap();
        let expect = [1.0, 4.0, 6.0, 4.0, 1.0].map(|x| x / 16.0);
        assert_eq!(pmf.support(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        for (p, q) in pmf.probs().iter().zip(expect) {
            assert!((p - q).abs() < 1e-16);
        }
        assert_eq!(pmf.tail_defect(), 0.0);
    }

    #[test]
    fn poisson_tail_is_certified() {
        let pmf = IndexModel::poisson(1.0).unwrap().materialize_pmf(1e-12).unwrap();
        let kmax = *pmf.support().last().unwrap() as u64;
        // omitted mass by direct summation of the exact tail
        let mut term = (-1.0f64).exp();
        let mut tail = 0.0;
        for k in 1..200u64 {
            term /= k as f64;
            if k > kmax {
                tail += term;
            }
        }
        assert!(tail <= 1e-12);
        assert!(tail <= pmf.tail_defect() * (1.0 + 1e-9));
        assert!((pmf.probs()[0] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn dirac_sampler_is_constant() {
        let mut rng = RandomStream::new(3);
        assert!(IndexModel::dirac(7).unwrap().sample(&mut rng, 1000).iter().all(|&n| n == 7));
    }

    #[test]
    fn hypergeometric_requires_n_le_total() {
        assert!(IndexModel::hypergeometric(21, 10, 10).is_err());
    }
}
