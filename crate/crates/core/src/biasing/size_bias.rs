use crate::error::{Error, Result};
use crate::models::IndexModel;
use crate::pmf::DiscretePmf;
use serde::Serialize;

/// Size-biased pmf q_k = k p_k / E[X].
pub fn size_bias_pmf(pmf: &DiscretePmf) -> Result<DiscretePmf> {
    if pmf.support()[0] < 0.0 {
        return Err(Error::InvalidParameter("size biasing needs a nonnegative law".into()));
    }
    let mean = pmf.mean();
    if !(mean > 0.0) {
        return Err(Error::ZeroMean);
    }
    let pairs = pmf.iter().filter(|(x, _)| *x > 0.0).map(|(x, p)| (x, x * p / mean));
    DiscretePmf::from_weights(pairs, pmf.tail_defect())
}

/// Distances between N and its size-biased version.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeBiasDistances {
    pub d_k: f64,
    pub d_tv: f64,
    pub d_w: f64,
}

/// d_K = d_TV = E|N - alpha| / (2 alpha) and d_W = gamma^2 / alpha.
pub fn size_bias_distance_identities(model: &IndexModel) -> Result<SizeBiasDistances> {
    let m = model.moments();
    if !(m.alpha > 0.0) {
        return Err(Error::ZeroMean);
    }
    let mad = model.functionals()?.mean_abs_dev;
    let d = mad / (2.0 * m.alpha);
    Ok(SizeBiasDistances { d_k: d, d_tv: d, d_w: m.gamma2 / m.alpha })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_becomes_point_mass() {
        let p = IndexModel::binomial(1, 0.3).unwrap().materialize_pmf(1e-12).unwrap();
        let q = size_bias_pmf(&p).unwrap();
        assert_eq!(q.support(), &[1.0]);
        assert!((q.probs()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_shifts_by_one() {
        let p = IndexModel::poisson(3.0).unwrap().materialize_pmf(1e-12).unwrap();
        let q = size_bias_pmf(&p).unwrap();
        for (k, qk) in q.iter() {
            assert!((qk - p.prob_at(k - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn binomial_is_one_plus_smaller_binomial() {
        let p = IndexModel::binomial(12, 0.35).unwrap().materialize_pmf(1e-12).unwrap();
        let r = IndexModel::binomial(11, 0.35).unwrap().materialize_pmf(1e-12).unwrap();
        let q = size_bias_pmf(&p).unwrap();
        for (k, qk) in q.iter() {
            assert!((qk - r.prob_at(k - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn hypergeometric_is_one_plus_smaller_hypergeometric() {
        let p = IndexModel::hypergeometric(5, 10, 10).unwrap().materialize_pmf(1e-12).unwrap();
        let r = IndexModel::hypergeometric(4, 9, 10).unwrap().materialize_pmf(1e-12).unwrap();
        let q = size_bias_pmf(&p).unwrap();
        for (k, qk) in q.iter() {
            assert!((qk - r.prob_at(k - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_mean_rejected() {
        assert_eq!(size_bias_pmf(&DiscretePmf::point_mass(0.0)), Err(Error::ZeroMean));
    }

    #[test]
    fn identity_values() {
        let d = size_bias_distance_identities(&IndexModel::binomial(20, 0.3).unwrap()).unwrap();
        assert!((d.d_w - 0.7).abs() < 1e-14);
        let d = size_bias_distance_identities(&IndexModel::hypergeometric(5, 10, 10).unwrap()).unwrap();
        assert!((d.d_w - 15.0 / 38.0).abs() < 1e-14);
        let d = size_bias_distance_identities(&IndexModel::poisson(1.0).unwrap()).unwrap();
        assert!((d.d_w - 1.0).abs() < 1e-14);
        // E|X-1|/2 for Poisson(1): only k = 0 contributes below the mean,
        // so E|X-1| = 2 P(X=0) = 2/e
        assert!((d.d_k - (-1.0f64).exp()).abs() < 1e-13);
        assert_eq!(d.d_k, d.d_tv);
    }
}
