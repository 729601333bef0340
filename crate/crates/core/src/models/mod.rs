//! Index and summand laws, their exact moments, pmfs and samplers.

mod index;
mod spec;
mod summand;

pub use index::{
    hyper_pmf_exact, IndexFamily, IndexFunctionals, IndexModel, IndexMoments, IndexSampler, DEFAULT_TAIL_TOL,
    MAX_SUPPORT,
};
pub use spec::{parse_index, parse_summand};
pub use summand::{SummandFamily, SummandModel, SummandMoments, SummandSampler};

use crate::error::{Error, Result};
use serde::Serialize;

/// Mean and variance of the random sum S = X_1 + ... + X_N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomSumMoments {
    pub mu: f64,
    pub sigma2: f64,
}

impl RandomSumMoments {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// mu = alpha*a and sigma^2 = alpha*c^2 + a^2*gamma^2.
pub fn random_sum_moments(index: &IndexMoments, summand: &SummandMoments) -> Result<RandomSumMoments> {
    let mu = index.alpha * summand.a;
    let sigma2 = index.alpha * summand.c2 + summand.a * summand.a * index.gamma2;
    if !(sigma2 > 0.0) {
        return Err(Error::DegenerateSum);
    }
    Ok(RandomSumMoments { mu, sigma2 })
}

/// All moments the bounds consume, in one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelMoments {
    pub index: IndexMoments,
    pub summand: SummandMoments,
    pub sum: RandomSumMoments,
}

impl ModelMoments {
    pub fn new(index: &IndexModel, summand: &SummandModel) -> Result<Self> {
        Self::from_parts(index.moments(), summand.moments())
    }

    pub fn from_parts(index: IndexMoments, summand: SummandMoments) -> Result<Self> {
        let sum = random_sum_moments(&index, &summand)?;
        Ok(Self { index, summand, sum })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        let m = ModelMoments::new(&IndexModel::dirac(100).unwrap(), &SummandModel::exponential(1.0).unwrap()).unwrap();
        assert_eq!((m.sum.mu, m.sum.sigma2), (100.0, 100.0));
        let m =
            ModelMoments::new(&IndexModel::binomial(10, 0.5).unwrap(), &SummandModel::constant(2.0).unwrap()).unwrap();
        assert!((m.sum.mu - 10.0).abs() < 1e-14 && (m.sum.sigma2 - 10.0).abs() < 1e-14);
        assert_eq!(
            ModelMoments::new(&IndexModel::dirac(4).unwrap(), &SummandModel::constant(1.0).unwrap()),
            Err(Error::DegenerateSum)
        );
    }

    #[test]
    fn thinning_identity_against_compound_pmf() {
        // Poisson(2) sum of Bernoulli(0.3) is Poisson(0.6); build its pmf by
        // compounding the binomial laws directly.
        let (lambda, p) = (2.0f64, 0.3f64);
        let index = IndexModel::poisson(lambda).unwrap();
        let npmf = index.materialize_pmf(1e-14).unwrap();
        let mut spmf = vec![0.0f64; 80];
        for (n, pn) in npmf.iter() {
            let bin = IndexModel::binomial(n as u64, p).unwrap().materialize_pmf(1e-14).unwrap();
            for (k, pk) in bin.iter() {
                spmf[k as usize] += pn * pk;
            }
        }
        let mean: f64 = spmf.iter().enumerate().map(|(k, q)| k as f64 * q).sum();
        let var: f64 = spmf.iter().enumerate().map(|(k, q)| (k as f64 - mean).powi(2) * q).sum();
        let m = ModelMoments::new(&index, &SummandModel::bernoulli(p).unwrap()).unwrap();
        assert!((m.sum.mu - mean).abs() < 1e-12);
        assert!((m.sum.sigma2 - var).abs() < 1e-12);
        assert!((m.sum.sigma2 - lambda * p).abs() < 1e-15);
    }
}
