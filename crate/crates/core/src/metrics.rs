//! Probability metrics: exact distances between finite laws and empirical
//! distances from a sample to the standard normal.

use crate::error::{Error, Result};
use crate::pmf::{DiscretePmf, ATOM_EPS};
use crate::special::{norm_cdf, norm_cdf_antiderivative, norm_quantile, norm_sf_integral};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateKind {
    Exact,
    Empirical,
}

/// A distance value, with a confidence half-width when it is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub band: Option<f64>,
    pub n: Option<u64>,
}

impl DistanceEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, kind: EstimateKind::Exact, band: None, n: None }
    }
}

/// Walks the merged support of two pmfs, yielding (x, p(x), q(x)).
fn merged(p: &DiscretePmf, q: &DiscretePmf) -> Vec<(f64, f64, f64)> {
    let (xs, ps) = (p.support(), p.probs());
    let (ys, qs) = (q.support(), q.probs());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    while i < xs.len() || j < ys.len() {
        let take_p = j == ys.len() || (i < xs.len() && xs[i] < ys[j] - ATOM_EPS);
        let take_q = i == xs.len() || (j < ys.len() && ys[j] < xs[i] - ATOM_EPS);
        if take_p {
            out.push((xs[i], ps[i], 0.0));
            i += 1;
        } else if take_q {
            out.push((ys[j], 0.0, qs[j]));
            j += 1;
        } else {
            out.push((xs[i].min(ys[j]), ps[i], qs[j]));
            i += 1;
            j += 1;
        }
    }
    out
}

/// sup |F_p - F_q|, evaluated just after each atom.
pub fn exact_kolmogorov(p: &DiscretePmf, q: &DiscretePmf) -> f64 {
    let (mut fp, mut fq, mut best) = (0.0f64, 0.0f64, 0.0f64);
    for (_, a, b) in merged(p, q) {
        fp += a;
        fq += b;
        best = best.max((fp - fq).abs());
    }
    best.min(1.0)
}

/// Half the l1 distance between the pmfs.
pub fn exact_total_variation(p: &DiscretePmf, q: &DiscretePmf) -> f64 {
    (0.5 * merged(p, q).iter().map(|(_, a, b)| (a - b).abs()).sum::<f64>()).min(1.0)
}

/// Integral of |F_p - F_q| over the line.
pub fn exact_wasserstein(p: &DiscretePmf, q: &DiscretePmf) -> f64 {
    let atoms = merged(p, q);
    let (mut fp, mut fq, mut total) = (0.0, 0.0, 0.0);
    for w in atoms.windows(2) {
        fp += w[0].1;
        fq += w[0].2;
        total += (w[1].0 - w[0].0) * (fp - fq).abs();
    }
    total
}

/// Empirical Kolmogorov and Wasserstein distances from a sample to N(0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalDistances {
    pub d_k: DistanceEstimate,
    pub d_w: DistanceEstimate,
}

/// Half-width of the 99% DKW band for a sample of size `n`.
pub fn dkw_band(n: usize) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * n as f64)).sqrt()
}

/// Integral of |c - Phi| over [a, b].
fn gap_integral(c: f64, a: f64, b: f64) -> f64 {
    let g = norm_cdf_antiderivative;
    let t = if c <= 0.0 {
        a
    } else if c >= 1.0 {
        b
    } else {
        norm_quantile(c).clamp(a, b)
    };
    let below = c * (t - a) - (g(t) - g(a));
    let above = (g(b) - g(t)) - c * (b - t);
    below.max(0.0) + above.max(0.0)
}

/// Distances between the empirical law of `sorted` and the standard normal.
/// The Wasserstein integral is exact piecewise; its band is a heuristic
/// three-standard-error width from the pointwise variance of F_n.
pub fn empirical_distance_to_normal(sorted: &[f64]) -> Result<EmpiricalDistances> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    if sorted.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter("sample must be sorted ascending".into()));
    }
    let n = sorted.len();
    let nf = n as f64;
    let mut d_k = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = norm_cdf(x);
        d_k = d_k.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let mut d_w = norm_cdf_antiderivative(sorted[0]) + norm_sf_integral(sorted[n - 1]);
    let mut spread = 0.0;
    for (i, w) in sorted.windows(2).enumerate() {
        if w[1] > w[0] {
            let c = (i + 1) as f64 / nf;
            d_w += gap_integral(c, w[0], w[1]);
            spread += (w[1] - w[0]) * (c * (1.0 - c)).sqrt();
        }
    }
    Ok(EmpiricalDistances {
        d_k: DistanceEstimate {
            value: d_k.min(1.0),
            kind: EstimateKind::Empirical,
            band: Some(dkw_band(n)),
            n: Some(n as u64),
        },
        d_w: DistanceEstimate {
            value: d_w,
            kind: EstimateKind::Empirical,
            band: Some(3.0 * spread / nf.sqrt()),
            n: Some(n as u64),
        },
    })
}

/// Holder interpolation d_K^{(p-1)/p} d_W^{1/p}; `p = inf` gives d_K.
pub fn lp_interpolation(d_k: f64, d_w: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    if !((0.0..=1.0).contains(&d_k) && d_w >= 0.0) {
        return Err(Error::InvalidParameter("need d_k in [0,1] and d_w >= 0".into()));
    }
    if p.is_infinite() {
        return Ok(d_k);
    }
    Ok(d_k.powf((p - 1.0) / p) * d_w.powf(1.0 / p))
}
