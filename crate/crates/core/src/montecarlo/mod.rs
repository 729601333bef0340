//! Reproducible simulation of standardized random sums and empirical checks
//! of the bounds, the bias identities and the concentration inequality.
//!
//! Work is cut into fixed-size chunks. Chunk `i` draws from its own stream
//! derived from the master seed, and chunk results are merged in chunk
//! order, so output does not depend on the number of workers.

mod checks;
mod experiment;

pub use checks::{
    concentration_bound, concentration_check, coupling_marginal_check, verify_bias_identity, ConcentrationReport,
    IdentityKind, IdentityMode, IdentityResidual, MarginalCheck, TestFunction,
};
pub use experiment::{
    default_theorems, needs_statistics, resolve_coupling, run_experiment, sweep_rows, BoundVerdict, ExperimentConfig,
    ExperimentReport, SkippedBound, SweepRow, Verdict,
};

use crate::error::{Error, Result};
use crate::models::{IndexModel, ModelMoments, SummandModel};
use crate::rng::RandomStream;

/// Largest sample held in memory for empirical distances.
pub const MAX_SAMPLE: u64 = 10_000_000;
/// Fewest replications an experiment accepts.
pub const MIN_REPS: u64 = 1_000;
pub const DEFAULT_CHUNK: u64 = 1 << 16;

/// Runs `f(chunk, count)` over `[0, reps)` cut into chunks of `chunk_size`,
/// returning results in chunk order. `jobs = 0` uses every core.
pub(crate) fn run_chunks<T, F>(reps: u64, chunk_size: u64, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync + Send,
{
    if chunk_size == 0 {
        return Err(Error::InvalidParameter("chunk size must be positive".into()));
    }
    let chunks = reps.div_ceil(chunk_size);
    let count = |i: u64| chunk_size.min(reps - i * chunk_size);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let work = || (0..chunks).into_par_iter().map(|i| f(i, count(i))).collect::<Result<Vec<T>>>();
        if jobs == 0 {
            work()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
                .install(work)
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        (0..chunks).map(|i| f(i, count(i))).collect()
    }
}

/// `count` draws of W = (S - alpha a) / sigma from `stream`, sorted.
pub fn sample_w_batch(
    index: &IndexModel,
    summand: &SummandModel,
    stream: &mut RandomStream,
    count: usize,
) -> Result<Vec<f64>> {
    let m = ModelMoments::new(index, summand)?;
    let (mu, sigma) = (m.sum.mu, m.sum.sigma());
    let ns = index.sampler();
    let xs = summand.sampler();
    let mut out: Vec<f64> = (0..count).map(|_| (xs.sample_sum(ns.sample(stream), stream) - mu) / sigma).collect();
    out.sort_unstable_by(f64::total_cmp);
    Ok(out)
}

/// `reps` draws of W under master `seed`, sorted.
pub fn sample_w(
    index: &IndexModel,
    summand: &SummandModel,
    reps: u64,
    seed: u64,
    chunk_size: u64,
    jobs: usize,
) -> Result<Vec<f64>> {
    if reps > MAX_SAMPLE {
        return Err(Error::SampleTooLarge(reps as usize));
    }
    ModelMoments::new(index, summand)?;
    let parts = run_chunks(reps, chunk_size, jobs, |i, n| {
        let mut stream = RandomStream::for_purpose(seed, "w", i);
        sample_w_batch(index, summand, &mut stream, n as usize)
    })?;
    let mut all: Vec<f64> = parts.into_iter().flatten().collect();
    all.sort_unstable_by(f64::total_cmp);
    Ok(all)
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter("need at least two paired points".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("x values must differ".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_dirac_one_is_pm_one() {
        let index = IndexModel::dirac(1).unwrap();
        let x = SummandModel::two_point(-1.0, 1.0, 0.5).unwrap();
        let w = sample_w(&index, &x, 5000, 3, 1024, 0).unwrap();
        assert!(w.iter().all(|v| *v == -1.0 || *v == 1.0));
        assert!(w.contains(&-1.0) && w.contains(&1.0));
    }

    #[test]
    fn poisson_bernoulli_one_is_standardized() {
        let lambda = 7.0;
        let index = IndexModel::poisson(lambda).unwrap();
        let x = SummandModel::bernoulli(1.0).unwrap();
        let n = 1_000_000u64;
        let w = sample_w(&index, &x, n, 11, DEFAULT_CHUNK, 0).unwrap();
        let mean = w.iter().sum::<f64>() / n as f64;
        let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // W = (N - lambda)/sqrt(lambda): mean SE 1/sqrt(n), variance SE sqrt((kurt - 1)/n)
        assert!(mean.abs() < 5.0 / (n as f64).sqrt(), "{mean}");
        let kurt = 3.0 + 1.0 / lambda;
        assert!((var - 1.0).abs() < 5.0 * ((kurt - 1.0) / n as f64).sqrt(), "{var}");
        let first = w[0] * lambda.sqrt() + lambda;
        assert!((first - first.round()).abs() < 1e-9);
    }

    #[test]
    fn output_ignores_worker_count() {
        let index = IndexModel::binomial(30, 0.4).unwrap();
        let x = SummandModel::exponential(2.0).unwrap();
        let a = sample_w(&index, &x, 20_000, 9, 1000, 1).unwrap();
        let b = sample_w(&index, &x, 20_000, 9, 1000, 4).unwrap();
        let c = sample_w(&index, &x, 20_000, 9, 1000, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = sample_w(&index, &x, 20_000, 10, 1000, 1).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn sample_cap_and_degenerate() {
        let index = IndexModel::poisson(2.0).unwrap();
        let x = SummandModel::exponential(1.0).unwrap();
        assert_eq!(sample_w(&index, &x, MAX_SAMPLE + 1, 1, DEFAULT_CHUNK, 0), Err(Error::SampleTooLarge(10_000_001)));
        let c = SummandModel::constant(1.0).unwrap();
        assert_eq!(sample_w(&IndexModel::dirac(3).unwrap(), &c, 10, 1, 4, 0), Err(Error::DegenerateSum));
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 10.0, 100.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 0.5).abs() < 1e-12);
        assert!(log_log_slope(&[1.0], &[1.0]).is_err());
    }
}
