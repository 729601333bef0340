//! Finite (possibly truncated) probability mass functions.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Atoms closer than this are merged.
pub const ATOM_EPS: f64 = 1e-14;

/// A pmf on finitely many sorted support points.
///
/// `tail_defect` bounds the probability mass that was cut off when the
/// law was truncated; it is zero for genuinely finite laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    support: Vec<f64>,
    probs: Vec<f64>,
    tail_defect: f64,
}

impl DiscretePmf {
    /// Validating constructor: sorted strictly increasing support,
    /// nonnegative probabilities, and `sum + tail_defect` within 1e-12 of 1.
    pub fn new(support: Vec<f64>, probs: Vec<f64>, tail_defect: f64) -> Result<Self> {
        if support.len() != probs.len() || support.is_empty() {
            return Err(Error::InvalidParameter(
                "pmf needs equally many (at least one) support points and probabilities".into(),
            ));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("pmf support must be finite".into()));
        }
        if support.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("pmf support must be strictly increasing".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter("pmf probabilities must be nonnegative".into()));
        }
        if !(tail_defect >= 0.0) {
            return Err(Error::InvalidParameter("tail defect must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_defect;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("pmf mass plus tail defect is {total}, expected 1")));
        }
        Ok(Self { support, probs, tail_defect })
    }

    /// Builds a pmf from unsorted (value, weight) pairs, merging atoms within
    /// [`ATOM_EPS`] and dropping zero weights. Weights are normalized to sum
    /// to `1 - tail_defect`.
    pub fn from_weights(pairs: impl IntoIterator<Item = (f64, f64)>, tail_defect: f64) -> Result<Self> {
        let mut v: Vec<(f64, f64)> = pairs.into_iter().collect();
        if v.iter().any(|(x, w)| !x.is_finite() || !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("non-finite value or negative weight".into()));
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(v.len());
        let mut probs: Vec<f64> = Vec::with_capacity(v.len());
        for (x, w) in v {
            if w == 0.0 {
                continue;
            }
            match support.last() {
                Some(&last) if (x - last).abs() <= ATOM_EPS * last.abs().max(1.0) => {
                    *probs.last_mut().unwrap() += w;
                }
                _ => {
                    support.push(x);
                    probs.push(w);
                }
            }
        }
        let total: f64 = probs.iter().sum();
        if support.is_empty() || total <= 0.0 {
            return Err(Error::InvalidParameter("pmf has no positive mass".into()));
        }
        let scale = (1.0 - tail_defect) / total;
        probs.iter_mut().for_each(|p| *p *= scale);
        Ok(Self { support, probs, tail_defect })
    }

    /// Point mass at `x`.
    pub fn point_mass(x: f64) -> Self {
        Self { support: vec![x], probs: vec![1.0], tail_defect: 0.0 }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_defect(&self) -> f64 {
        self.tail_defect
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    /// E[g(X)] over the retained atoms.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, p)| p * g(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|x| (x - m) * (x - m))
    }

    /// P(X <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.support.partition_point(|&s| s <= x);
        self.probs[..k].iter().sum()
    }

    /// Probability of the atom at `x` (0 if absent).
    pub fn prob_at(&self, x: f64) -> f64 {
        match self.support.binary_search_by(|s| s.total_cmp(&x)) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    /// Shifts every support point by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            support: self.support.iter().map(|x| x + c).collect(),
            probs: self.probs.clone(),
            tail_defect: self.tail_defect,
        }
    }

    /// Cumulative sums normalized so the last entry is exactly 1.
    pub fn normalized_cdf_table(&self) -> Vec<f64> {
        let total: f64 = self.probs.iter().sum();
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc / total
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    /// Whether every support point is a nonnegative integer.
    pub fn is_integer_valued(&self) -> bool {
        self.support.iter().all(|x| *x >= 0.0 && x.fract() == 0.0)
    }
}

/// Inverse-CDF sampler over a [`DiscretePmf`], renormalized against the
/// tail defect.
#[derive(Debug, Clone)]
pub struct PmfSampler {
    support: Vec<f64>,
    cdf: Vec<f64>,
}

impl PmfSampler {
    pub fn new(pmf: &DiscretePmf) -> Self {
        Self { support: pmf.support().to_vec(), cdf: pmf.normalized_cdf_table() }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c < u).min(self.support.len() - 1);
        self.support[i]
    }
}

/// Parses a `value,probability` CSV (header optional).
pub fn read_pmf_csv(text: &str) -> Result<DiscretePmf> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut pairs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected `value,probability`", i + 1)));
        }
        let (x, p) = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        match (x, p) {
            (Ok(x), Ok(p)) => pairs.push((x, p)),
            _ if i == 0 => continue,
            _ => return Err(Error::Parse(format!("line {}: not a number", i + 1))),
        }
    }
    let total: f64 = pairs.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("pmf probabilities sum to {total}, expected 1")));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParameter("duplicate support point in pmf".into()));
    }
    let (s, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    DiscretePmf::new(s, p, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_mass() {
        assert!(DiscretePmf::new(vec![0.0, 1.0], vec![0.5, 0.4], 0.0).is_err());
        assert!(DiscretePmf::new(vec![1.0, 0.0], vec![0.5, 0.5], 0.0).is_err());
        assert!(DiscretePmf::new(vec![0.0, 1.0], vec![0.5, 0.5], 0.0).is_ok());
    }

    #[test]
    fn merges_close_atoms() {
        let p = DiscretePmf::from_weights([(1.0, 1.0), (0.0, 2.0), (1.0 + 1e-16, 1.0)], 0.0).unwrap();
        assert_eq!(p.support(), &[0.0, 1.0]);
        assert_eq!(p.probs(), &[0.5, 0.5]);
        assert!((p.cdf(0.5) - 0.5).abs() < 1e-16);
        assert_eq!(p.cdf(1.0), 1.0);
    }

    #[test]
    fn csv_roundtrip() {
        let p = read_pmf_csv("value,probability\n-1,0.5\n0,0.25\n2,0.25\n").unwrap();
        assert_eq!(p.support(), &[-1.0, 0.0, 2.0]);
        assert!(read_pmf_csv("0,0.5\n1,0.6\n").is_err());
    }
}
