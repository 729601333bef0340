use super::{sample_w, DEFAULT_CHUNK, MAX_SAMPLE, MIN_REPS};
use crate::biasing::{
    make_coupling, read_joint_csv, CouplingKind, CouplingStatistics, SizeBiasCoupling, StatisticsMode,
};
use crate::bounds::{evaluate, specialization_for, BoundConstants, BoundReport, Metric, TheoremId};
use crate::error::{Error, Result};
use crate::metrics::{empirical_distance_to_normal, EmpiricalDistances};
use crate::models::{parse_index, parse_summand, IndexModel, ModelMoments};
use crate::rng::DEFAULT_SEED;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub index: String,
    pub summand: String,
    /// Defaults to the family-specific coupling of the index.
    pub coupling: Option<CouplingKind>,
    /// CSV of (n, n_s, probability) used instead of a built-in coupling.
    pub joint_pmf: Option<PathBuf>,
    pub reps: u64,
    pub seed: u64,
    pub chunk_size: u64,
    /// Worker threads; 0 uses every core. Does not affect results.
    pub jobs: usize,
    /// Bounds to evaluate; empty selects every bound that applies.
    pub theorems: Vec<TheoremId>,
    pub metrics: Vec<Metric>,
    pub constants: BoundConstants,
    /// Replications for coupling statistics without an exact joint law.
    pub coupling_reps: u64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(index: impl Into<String>, summand: impl Into<String>) -> Self {
        Self {
            index: index.into(),
            summand: summand.into(),
            coupling: None,
            joint_pmf: None,
            reps: 100_000,
            seed: DEFAULT_SEED,
            chunk_size: DEFAULT_CHUNK,
            jobs: 0,
            theorems: Vec::new(),
            metrics: vec![Metric::Kolmogorov, Metric::Wasserstein],
            constants: BoundConstants::default(),
            coupling_reps: 200_000,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Dominates,
    Violated,
    InconclusiveWithinBand,
}

impl Verdict {
    /// Violated only when the estimate minus its band exceeds the bound.
    pub fn assign(empirical: f64, band: f64, bound: f64) -> Self {
        if empirical - band > bound {
            Verdict::Violated
        } else if empirical + band <= bound {
            Verdict::Dominates
        } else {
            Verdict::InconclusiveWithinBand
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Dominates => "dominates",
            Verdict::Violated => "violated",
            Verdict::InconclusiveWithinBand => "inconclusive-within-band",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundVerdict {
    pub theorem: TheoremId,
    pub metric: Metric,
    pub bound: f64,
    pub empirical: f64,
    pub band: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedBound {
    pub theorem: TheoremId,
    pub metric: Metric,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub mu: f64,
    pub sigma: f64,
    pub empirical: EmpiricalDistances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistics: Option<CouplingStatistics>,
    pub bounds: Vec<BoundReport>,
    pub verdicts: Vec<BoundVerdict>,
    pub skipped: Vec<SkippedBound>,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn any_violated(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict == Verdict::Violated)
    }

    pub fn verdict(&self, theorem: TheoremId, metric: Metric) -> Option<&BoundVerdict> {
        self.verdicts.iter().find(|v| v.theorem == theorem && v.metric == metric)
    }
}

fn build_coupling(config: &ExperimentConfig, index: &IndexModel) -> Result<SizeBiasCoupling> {
    resolve_coupling(index, config.coupling, config.joint_pmf.as_deref())
}

/// The coupling read from `joint_pmf` if given, else `kind`, else the
/// family default. A joint law must have the same mean as `index`.
pub fn resolve_coupling(
    index: &IndexModel,
    kind: Option<CouplingKind>,
    joint_pmf: Option<&Path>,
) -> Result<SizeBiasCoupling> {
    if let Some(path) = joint_pmf {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let coupling = SizeBiasCoupling::from_joint(read_joint_csv(&text)?)?;
        let joint_alpha = coupling.index().moments().alpha;
        if (joint_alpha - index.moments().alpha).abs() > 1e-9 * joint_alpha.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "joint pmf has E[N] = {joint_alpha}, index has {}",
                index.moments().alpha
            )));
        }
        return Ok(coupling);
    }
    make_coupling(index, kind.unwrap_or_else(|| CouplingKind::default_for(index)))
}

/// Bounds evaluated when none are named: the Wasserstein theorem, the
/// Kolmogorov theorem (general form when P(D < 0) > 0), the mean-zero
/// bound for centered summands and the specialization of the index family.
pub fn default_theorems(index: &IndexModel, m: &ModelMoments, p_dneg: f64) -> Vec<TheoremId> {
    let mut out = vec![TheoremId::Thm3a, if p_dneg > 0.0 { TheoremId::General } else { TheoremId::Thm3b }];
    if m.summand.a.abs() <= 1e-12 * m.summand.b2.sqrt() {
        out.push(TheoremId::Thm5);
    }
    if let Ok(t) = specialization_for(index) {
        out.push(t);
    }
    out
}

/// The (theorem, metric) pairs to evaluate and whether each was asked for
/// explicitly.
fn selection(
    config: &ExperimentConfig,
    index: &IndexModel,
    m: &ModelMoments,
    p_dneg: f64,
) -> Vec<(TheoremId, Metric, bool)> {
    let wanted: Vec<(TheoremId, bool)> = if config.theorems.is_empty() {
        default_theorems(index, m, p_dneg).into_iter().map(|t| (t, false)).collect()
    } else {
        config.theorems.iter().map(|t| (*t, true)).collect()
    };
    let mut out = Vec::new();
    for (t, explicit) in wanted {
        for metric in &config.metrics {
            if t.supports(*metric) {
                out.push((t, *metric, explicit));
            }
        }
    }
    out
}

/// Whether a bound reads coupling statistics.
pub fn needs_statistics(t: TheoremId) -> bool {
    matches!(t, TheoremId::Thm3a | TheoremId::Thm3b | TheoremId::General)
}

/// Simulates W, evaluates the selected bounds and compares them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if config.reps < MIN_REPS {
        return Err(Error::InvalidParameter(format!("replications must be at least {MIN_REPS}")));
    }
    if config.reps > MAX_SAMPLE {
        return Err(Error::SampleTooLarge(config.reps as usize));
    }
    if config.metrics.is_empty() {
        return Err(Error::InvalidParameter("no metric selected".into()));
    }
    let index = parse_index(&config.index)?;
    let summand = parse_summand(&config.summand)?;
    let m = ModelMoments::new(&index, &summand)?;

    let sample = sample_w(&index, &summand, config.reps, config.seed, config.chunk_size, config.jobs)?;
    let empirical = empirical_distance_to_normal(&sample)?;
    drop(sample);

    let wants_stats = config.theorems.is_empty() || config.theorems.iter().any(|t| needs_statistics(*t));
    let statistics = if wants_stats {
        let coupling = build_coupling(config, &index)?;
        let mode = StatisticsMode::Auto { reps: config.coupling_reps, seed: config.seed };
        Some(coupling.statistics(mode)?)
    } else {
        None
    };
    let p_dneg = statistics.as_ref().map_or(0.0, |s| s.p_dneg);

    let mut bounds = Vec::new();
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();
    for (theorem, metric, explicit) in selection(config, &index, &m, p_dneg) {
        match evaluate(theorem, metric, &index, &summand, statistics.as_ref(), &config.constants) {
            Ok(report) => {
                let est = match metric {
                    Metric::Kolmogorov => empirical.d_k,
                    Metric::Wasserstein => empirical.d_w,
                };
                let band = est.band.unwrap_or(0.0);
                verdicts.push(BoundVerdict {
                    theorem,
                    metric,
                    bound: report.total,
                    empirical: est.value,
                    band,
                    verdict: Verdict::assign(est.value, band, report.total),
                });
                bounds.push(report);
            }
            Err(e) if !explicit => skipped.push(SkippedBound { theorem, metric, reason: e.to_string() }),
            Err(e) => return Err(e),
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        mu: m.sum.mu,
        sigma: m.sum.sigma(),
        empirical,
        statistics,
        bounds,
        verdicts,
        skipped,
        seed: config.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// One CSV line of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index_params: String,
    pub summand: String,
    pub reps: u64,
    pub seed: u64,
    pub d_k_emp: f64,
    pub d_k_band: f64,
    pub d_w_emp: f64,
    pub bound_id: String,
    pub bound_total: f64,
    pub verdict: &'static str,
}

/// One row per verdict, with `bound_id` written `theorem/metric`.
pub fn sweep_rows(report: &ExperimentReport) -> Vec<SweepRow> {
    report
        .verdicts
        .iter()
        .map(|v| SweepRow {
            index_params: report.config.index.clone(),
            summand: report.config.summand.clone(),
            reps: report.config.reps,
            seed: report.seed,
            d_k_emp: report.empirical.d_k.value,
            d_k_band: report.empirical.d_k.band.unwrap_or(0.0),
            d_w_emp: report.empirical.d_w.value,
            bound_id: format!("{}/{}", v.theorem, v.metric),
            bound_total: v.bound,
            verdict: v.verdict.name(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn without_time(mut r: ExperimentReport) -> ExperimentReport {
        r.wall_time_s = 0.0;
        r
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(Verdict::assign(0.1, 0.01, 0.2), Verdict::Dominates);
        assert_eq!(Verdict::assign(0.195, 0.01, 0.2), Verdict::InconclusiveWithinBand);
        assert_eq!(Verdict::assign(0.205, 0.01, 0.2), Verdict::InconclusiveWithinBand);
        assert_eq!(Verdict::assign(0.3, 0.01, 0.2), Verdict::Violated);
    }

    #[test]
    fn poisson_experiment_selects_all_bounds() {
        let mut cfg = ExperimentConfig::new("poisson:lambda=30", "exp:rate=1");
        cfg.reps = 20_000;
        let r = run_experiment(&cfg).unwrap();
        let ids: Vec<(TheoremId, Metric)> = r.verdicts.iter().map(|v| (v.theorem, v.metric)).collect();
        assert!(ids.contains(&(TheoremId::Thm3a, Metric::Wasserstein)));
        assert!(ids.contains(&(TheoremId::Thm3b, Metric::Kolmogorov)));
        assert!(ids.contains(&(TheoremId::Cor6, Metric::Kolmogorov)));
        assert!(ids.contains(&(TheoremId::Cor6, Metric::Wasserstein)));
        assert!(!r.any_violated());
        assert_eq!(r.bounds.len(), r.verdicts.len());
    }

    #[test]
    fn deterministic_across_jobs() {
        let mut cfg = ExperimentConfig::new("binomial:n=40,p=0.3", "bernoulli:p=0.3");
        cfg.reps = 10_000;
        cfg.chunk_size = 1000;
        cfg.jobs = 1;
        let a = without_time(run_experiment(&cfg).unwrap());
        cfg.jobs = 3;
        let mut b = without_time(run_experiment(&cfg).unwrap());
        b.config.jobs = 1;
        assert_eq!(a, b);
    }

    #[test]
    fn explicit_selection_and_errors() {
        let mut cfg = ExperimentConfig::new("dirac:n=50", "twopoint:x0=-1,x1=1,p=0.5");
        cfg.reps = 5_000;
        cfg.theorems = vec![TheoremId::Cor4, TheoremId::Thm5];
        let r = run_experiment(&cfg).unwrap();
        assert!(r.statistics.is_none());
        assert_eq!(r.verdicts.len(), 4);
        cfg.theorems = vec![TheoremId::Thm5];
        cfg.summand = "exp:rate=1".into();
        assert!(matches!(run_experiment(&cfg), Err(Error::NonzeroMean(_))));
        cfg.reps = 10;
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn huge_bound_trivially_dominates() {
        let mut cfg = ExperimentConfig::new("dirac:n=1", "exp:rate=1");
        cfg.reps = 1_000;
        cfg.theorems = vec![TheoremId::Cor4];
        let r = run_experiment(&cfg).unwrap();
        assert!(r.verdicts.iter().all(|v| v.verdict == Verdict::Dominates && v.bound > 1.0));
        let rows = sweep_rows(&r);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].bound_id, "cor4/kolmogorov");
    }
}
