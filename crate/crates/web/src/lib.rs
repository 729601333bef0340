//! Browser bindings: evaluate bounds, simulate W, tabulate Stein solutions.

use randsum::biasing::StatisticsMode;
use randsum::bounds::{evaluate, BoundConstants, Metric, TheoremId};
use randsum::metrics::empirical_distance_to_normal;
use randsum::models::{parse_index, parse_summand, ModelMoments};
use randsum::montecarlo::{default_theorems, needs_statistics, resolve_coupling, sample_w, Verdict};
use randsum::stein::{fz_derivative, fz_value};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const COUPLING_REPS: u64 = 50_000;
const MAX_DEMO_REPS: u64 = 2_000_000;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

#[derive(Serialize)]
pub struct Row {
    pub theorem: TheoremId,
    pub metric: Metric,
    pub total: f64,
    pub empirical: Option<f64>,
    pub band: Option<f64>,
    pub verdict: Option<Verdict>,
}

#[derive(Serialize)]
pub struct Summary {
    pub mu: f64,
    pub sigma: f64,
    pub d_k: Option<f64>,
    pub d_w: Option<f64>,
    pub rows: Vec<Row>,
    pub skipped: Vec<String>,
}

/// Every applicable bound for the model, optionally compared with `reps`
/// simulated draws of W (0 skips the simulation).
pub fn summarize(index: &str, summand: &str, reps: u64, seed: u64) -> Result<Summary, String> {
    let index = parse_index(index).map_err(fail)?;
    let summand = parse_summand(summand).map_err(fail)?;
    let m = ModelMoments::new(&index, &summand).map_err(fail)?;
    if reps > MAX_DEMO_REPS {
        return Err(format!("at most {MAX_DEMO_REPS} replications in the browser"));
    }
    let stats = resolve_coupling(&index, None, None)
        .and_then(|c| c.statistics(StatisticsMode::Auto { reps: COUPLING_REPS, seed }))
        .ok();
    let empirical = if reps > 0 {
        let sample = sample_w(&index, &summand, reps, seed, 1 << 14, 1).map_err(fail)?;
        Some(empirical_distance_to_normal(&sample).map_err(fail)?)
    } else {
        None
    };
    let constants = BoundConstants::default();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for t in default_theorems(&index, &m, stats.as_ref().map_or(0.0, |s| s.p_dneg)) {
        if needs_statistics(t) && stats.is_none() {
            skipped.push(format!("{t}: no coupling statistics"));
            continue;
        }
        for metric in [Metric::Kolmogorov, Metric::Wasserstein] {
            if !t.supports(metric) {
                continue;
            }
            match evaluate(t, metric, &index, &summand, stats.as_ref(), &constants) {
                Ok(r) => {
                    let est = empirical.as_ref().map(|e| match metric {
                        Metric::Kolmogorov => e.d_k,
                        Metric::Wasserstein => e.d_w,
                    });
                    let band = est.and_then(|e| e.band);
                    rows.push(Row {
                        theorem: t,
                        metric,
                        total: r.total,
                        empirical: est.map(|e| e.value),
                        band,
                        verdict: est.map(|e| Verdict::assign(e.value, band.unwrap_or(0.0), r.total)),
                    });
                }
                Err(e) => skipped.push(format!("{t} {metric}: {e}")),
            }
        }
    }
    Ok(Summary {
        mu: m.sum.mu,
        sigma: m.sum.sigma(),
        d_k: empirical.as_ref().map(|e| e.d_k.value),
        d_w: empirical.as_ref().map(|e| e.d_w.value),
        rows,
        skipped,
    })
}

/// Itemized report of one bound as JSON.
pub fn bound_report(index: &str, summand: &str, theorem: &str, metric: &str) -> Result<String, String> {
    let theorem: TheoremId = theorem.parse().map_err(fail)?;
    let metric: Metric = metric.parse().map_err(fail)?;
    let index = parse_index(index).map_err(fail)?;
    let summand = parse_summand(summand).map_err(fail)?;
    let stats = if needs_statistics(theorem) {
        let c = resolve_coupling(&index, None, None).map_err(fail)?;
        Some(
            c.statistics(StatisticsMode::Auto { reps: COUPLING_REPS, seed: randsum::rng::DEFAULT_SEED })
                .map_err(fail)?,
        )
    } else {
        None
    };
    let r = evaluate(theorem, metric, &index, &summand, stats.as_ref(), &BoundConstants::default()).map_err(fail)?;
    serde_json::to_string(&r).map_err(fail)
}

/// (x, f_z(x), f_z'(x)) triples on `n` evenly spaced points of [lo, hi].
pub fn stein_table(z: f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .flat_map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            [x, fz_value(z, x), fz_derivative(z, x)]
        })
        .collect()
}

#[wasm_bindgen]
pub fn simulate(index: &str, summand: &str, reps: u32, seed: u32) -> Result<String, JsValue> {
    let s = summarize(index, summand, reps as u64, seed as u64).map_err(|e| JsValue::from_str(&e))?;
    serde_json::to_string(&s).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn bound(index: &str, summand: &str, theorem: &str, metric: &str) -> Result<String, JsValue> {
    bound_report(index, summand, theorem, metric).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn stein_curve(z: f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    stein_table(z, lo, hi, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_lists_poisson_bounds() {
        let s = summarize("poisson:lambda=100", "exp:rate=1", 20_000, 7).unwrap();
        assert!(s.rows.iter().any(|r| r.theorem == TheoremId::Cor6 && r.metric == Metric::Wasserstein));
        assert!(s.rows.iter().all(|r| r.verdict == Some(Verdict::Dominates)));
        assert!(s.d_k.unwrap() < 0.05);
    }

    #[test]
    fn bound_report_is_json() {
        let text = bound_report("dirac:n=100", "twopoint:x0=-1,x1=1,p=0.5", "cor4", "w").unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["total"].as_f64().unwrap() - 0.3).abs() < 1e-15);
        assert!(bound_report("dirac:n=100", "exp:rate=1", "cor9", "w").is_err());
    }

    #[test]
    fn stein_table_layout() {
        let t = stein_table(0.0, -1.0, 1.0, 3);
        assert_eq!(t.len(), 9);
        assert_eq!(t[3], 0.0);
        assert!((t[4] - randsum::stein::FZ_SUP).abs() < 1e-15);
    }
}
