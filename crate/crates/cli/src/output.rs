use crate::suites::Outcome;
use randsum::bounds::BoundReport;
use randsum::montecarlo::{ExperimentReport, SweepRow};
use std::io::Write;

/// `x` rounded to six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    if x.abs() < 1e-4 || x.abs() >= 1e9 {
        let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let rounded: f64 = sci.parse().unwrap_or(x);
    rounded.to_string()
}

pub fn bounds_table(w: &mut dyn Write, reports: &[BoundReport]) -> std::io::Result<()> {
    for r in reports {
        writeln!(w, "{} {}  total {}", r.theorem, r.metric, sig6(r.total))?;
        let width = r.terms.iter().chain(&r.extras).map(|t| t.label.chars().count()).max().unwrap_or(0);
        for t in &r.terms {
            writeln!(w, "  {:<width$}  {}", t.label, sig6(t.value))?;
        }
        for t in &r.extras {
            writeln!(w, "  ({:<width$}) {}", t.label, sig6(t.value))?;
        }
    }
    Ok(())
}

pub fn bounds_csv(w: &mut dyn Write, reports: &[BoundReport]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["theorem", "metric", "label", "value"])?;
    for r in reports {
        let (t, m) = (r.theorem.to_string(), r.metric.to_string());
        for term in &r.terms {
            out.write_record([t.as_str(), m.as_str(), term.label.as_str(), &term.value.to_string()])?;
        }
        out.write_record([t.as_str(), m.as_str(), "total", &r.total.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn sweep_csv(w: &mut dyn Write, rows: &[SweepRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    if rows.is_empty() {
        out.write_record([
            "index_params",
            "summand",
            "reps",
            "seed",
            "d_k_emp",
            "d_k_band",
            "d_w_emp",
            "bound_id",
            "bound_total",
            "verdict",
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn experiment_table(w: &mut dyn Write, r: &ExperimentReport) -> std::io::Result<()> {
    writeln!(w, "index {}  summand {}  reps {}  seed {}", r.config.index, r.config.summand, r.config.reps, r.seed)?;
    writeln!(w, "mu {}  sigma {}", sig6(r.mu), sig6(r.sigma))?;
    let band = |b: Option<f64>| sig6(b.unwrap_or(0.0));
    writeln!(w, "empirical d_K {} +- {}", sig6(r.empirical.d_k.value), band(r.empirical.d_k.band))?;
    writeln!(w, "empirical d_W {} +- {}", sig6(r.empirical.d_w.value), band(r.empirical.d_w.band))?;
    for v in &r.verdicts {
        writeln!(
            w,
            "  {:<6} {:<12} bound {:<12} {}",
            v.theorem.to_string(),
            v.metric.to_string(),
            sig6(v.bound),
            v.verdict.name()
        )?;
    }
    for s in &r.skipped {
        writeln!(w, "  {:<6} {:<12} skipped: {}", s.theorem.to_string(), s.metric.to_string(), s.reason)?;
    }
    Ok(())
}

pub fn outcomes_table(w: &mut dyn Write, outcomes: &[Outcome]) -> std::io::Result<()> {
    for o in outcomes {
        writeln!(w, "{} {}/{}  {}", if o.pass { "PASS" } else { "FAIL" }, o.suite, o.check, o.detail)?;
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    writeln!(w, "{} checks, {} failed", outcomes.len(), failed)
}
