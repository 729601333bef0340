use super::theorems::{sqrt_2_over_pi, SQRT_2PI};
#[cfg(test)]
use super::BoundReport;
use super::{assemble, hyper_eps_f64, inputs, BoundConstants, BoundPair, BoundTerm, Metric, Snap, TermFn, TheoremId};
use crate::error::{Error, Result};
use crate::models::{IndexFamily, IndexModel, ModelMoments, SummandModel};
use std::f64::consts::SQRT_2;

/// α²E[D²] for the infinitely divisible coupling.
fn infdiv_e2(s: &Snap) -> f64 {
    s.alpha * s.delta3 + s.gamma2 * s.gamma2 - s.beta2 * s.beta2 - s.gamma2 * s.alpha * s.alpha
}

const COR3_W: [(&str, TermFn); 3] = [
    ("2c²bγ²/σ³", |s| 2.0 * s.c * s.c * s.b * s.gamma2 / s.sigma3()),
    ("3αd³/σ³", |s| 3.0 * s.alpha * s.d3 / s.sigma3()),
    ("E₂|a|b²/(ασ³)", |s| infdiv_e2(s) * s.abs_a() * s.b * s.b / (s.alpha * s.sigma3())),
];

const COR3_K: [(&str, TermFn); 7] = [
    ("d³α(3√2π+4)/(8σ³)", |s| s.d3 * s.alpha * (3.0 * SQRT_2PI + 4.0) / (8.0 * s.sigma3())),
    ("c³α/σ³", |s| s.c.powi(3) * s.alpha / s.sigma3()),
    ("(7/2√2+2)√αd³/(cσ²)", |s| (3.5 * SQRT_2 + 2.0) * s.alpha.sqrt() * s.d3 / (s.c * s.sigma2())),
    ("c²α/σ²·P(N=0)", |s| s.c * s.c * s.alpha / s.sigma2() * s.p_n0),
    ("|a|b²E₂/(ασ³)·(√2π/8+1/2)", |s| {
        s.abs_a() * s.b * s.b * infdiv_e2(s) / (s.alpha * s.sigma3()) * (SQRT_2PI / 8.0 + 0.5)
    }),
    ("√E₂((√2π+4)bc²/(4σ³) + √P(N=0)|a|b/σ²)", |s| {
        infdiv_e2(s).max(0.0).sqrt()
            * ((SQRT_2PI + 4.0) * s.b * s.c * s.c / (4.0 * s.sigma3()) + s.p_n0.sqrt() * s.abs_a() * s.b / s.sigma2())
    }),
    ("E[N^-½1{N≥1}](|a|b²E₂/(cασ²√2π) + γ²d³|a|b/σ² + d³α/(cσ²) + γ²bc/(σ²√2π))", |s| {
        let cs2 = s.c * s.sigma2();
        s.e_ninvhalf
            * (s.abs_a() * s.b * s.b * infdiv_e2(s) / (cs2 * s.alpha * SQRT_2PI)
                + s.gamma2 * s.d3 * s.abs_a() * s.b / s.sigma2()
                + s.d3 * s.alpha / cs2
                + s.gamma2 * s.b * s.c / (s.sigma2() * SQRT_2PI))
    }),
];

fn cube_ratio(s: &Snap) -> f64 {
    s.d3 / s.c.powi(3)
}

const COR4_W: [(&str, TermFn); 1] = [("3d³/(c³√N)", |s| 3.0 * cube_ratio(s) / s.n.sqrt())];

const COR4_K: [(&str, TermFn); 2] = [
    ("1/√N", |s| 1.0 / s.n.sqrt()),
    ("(7/2(1+√2)+3√2π/8)d³/(c³√N)", |s| {
        (3.5 * (1.0 + SQRT_2) + 3.0 * SQRT_2PI / 8.0) * cube_ratio(s) / s.n.sqrt()
    }),
];

/// Base-law moments sit in the index fields, `n` is the number of copies.
const COR5_W: [(&str, TermFn); 4] = [
    ("2c²bγ₁²/(σ₁³√n)", |s| 2.0 * s.c * s.c * s.b * s.gamma2 / (s.sigma3() * s.n.sqrt())),
    ("3α₁d³/(σ₁³√n)", |s| 3.0 * s.alpha * s.d3 / (s.sigma3() * s.n.sqrt())),
    ("√(2/π)α₁a²γ₁²/(σ₁²√n)", |s| {
        sqrt_2_over_pi() * s.alpha * s.a2() * s.gamma2 / (s.sigma2() * s.n.sqrt())
    }),
    ("2α₁(a²b+|a|b²)(δ₁³/α₁−β₁²)/(σ₁³√n)", |s| {
        2.0 * s.alpha * (s.a2() * s.b + s.abs_a() * s.b * s.b) / s.sigma3() * (s.delta3 / s.alpha - s.beta2)
            / s.n.sqrt()
    }),
];

const COR6_W: [(&str, TermFn); 3] = [
    ("2c²/(b²√λ)", |s| 2.0 * s.c * s.c / (s.b * s.b * s.alpha.sqrt())),
    ("3d³/(b³√λ)", |s| 3.0 * s.d3 / (s.b.powi(3) * s.alpha.sqrt())),
    ("|a|/(b√λ)", |s| s.abs_a() / (s.b * s.alpha.sqrt())),
];

const COR6_K: [(&str, TermFn); 9] = [
    ("(√2π/4+1)/√λ", |s| (SQRT_2PI / 4.0 + 1.0) / s.alpha.sqrt()),
    ("(3√2π+4)d³/(8b³√λ)", |s| (3.0 * SQRT_2PI + 4.0) * s.d3 / (8.0 * s.b.powi(3) * s.alpha.sqrt())),
    ("c³/(b³√λ)", |s| s.c.powi(3) / (s.b.powi(3) * s.alpha.sqrt())),
    ("(7/2√2+3)d³/(cb²√λ)", |s| (3.5 * SQRT_2 + 3.0) * s.d3 / (s.c * s.b * s.b * s.alpha.sqrt())),
    ("|a|(√2π+4+8d³)/(8b√λ)", |s| s.abs_a() * (SQRT_2PI + 4.0 + 8.0 * s.d3) / (8.0 * s.b * s.alpha.sqrt())),
    ("|a|/(c√2π√λ)", |s| s.abs_a() / (s.c * SQRT_2PI * s.alpha.sqrt())),
    ("c/(b√2π√λ)", |s| s.c / (s.b * SQRT_2PI * s.alpha.sqrt())),
    ("c²e^{−λ}/b²", |s| s.c * s.c / (s.b * s.b) * (-s.alpha).exp()),
    ("|a|e^{−λ/2}/b", |s| s.abs_a() / s.b * (-s.alpha / 2.0).exp()),
];

/// b² − pa², the summand factor of the binomial variance.
fn binom_v(s: &Snap) -> f64 {
    s.b * s.b - s.p * s.a2()
}

fn binom_q(s: &Snap) -> f64 {
    (s.n * s.p).sqrt() * binom_v(s).powf(1.5)
}

fn binom_r(s: &Snap) -> f64 {
    (s.n * s.p).sqrt() * binom_v(s)
}

const COR7_W: [(&str, TermFn); 3] = [
    ("(2c²b+|a|b²)(1−p)/Q", |s| (2.0 * s.c * s.c * s.b + s.abs_a() * s.b * s.b) * (1.0 - s.p) / binom_q(s)),
    ("3d³/Q", |s| 3.0 * s.d3 / binom_q(s)),
    ("√(2/π)a²p√(b²−pa²)√(1−p)/Q", |s| {
        sqrt_2_over_pi() * s.a2() * s.p * binom_v(s).sqrt() * (1.0 - s.p).sqrt() / binom_q(s)
    }),
];

const COR7_K: [(&str, TermFn); 10] = [
    ("c³/Q", |s| s.c.powi(3) / binom_q(s)),
    ("(√2π+4)bc²√(1−p)/(4Q)", |s| (SQRT_2PI + 4.0) * s.b * s.c * s.c * (1.0 - s.p).sqrt() / (4.0 * binom_q(s))),
    ("(3√2π+4)d³/(8Q)", |s| (3.0 * SQRT_2PI + 4.0) * s.d3 / (8.0 * binom_q(s))),
    ("|a|b²√(1−p)/(2Q)", |s| s.abs_a() * s.b * s.b * (1.0 - s.p).sqrt() / (2.0 * binom_q(s))),
    ("|a|b²√2π(1−p)/(8Q)", |s| s.abs_a() * s.b * s.b * SQRT_2PI * (1.0 - s.p) / (8.0 * binom_q(s))),
    ("(9/2√2+2)d³/(cR)", |s| (4.5 * SQRT_2 + 2.0) * s.d3 / (s.c * binom_r(s))),
    ("√(1−p)(a²p+√2|a|bd³)/R", |s| {
        (1.0 - s.p).sqrt() * (s.a2() * s.p + SQRT_2 * s.abs_a() * s.b * s.d3) / binom_r(s)
    }),
    ("√(2(1−p))b(2b²−a²)/(c√2πR)", |s| {
        (2.0 * (1.0 - s.p)).sqrt() * s.b * (2.0 * s.b * s.b - s.a2()) / (s.c * SQRT_2PI * binom_r(s))
    }),
    ("c²(1−p)^n/(b²−pa²)", |s| s.c * s.c / binom_v(s) * (1.0 - s.p).powf(s.n)),
    ("|a|b(1−p)^{(n+1)/2}/(b²−pa²)", |s| s.abs_a() * s.b / binom_v(s) * (1.0 - s.p).powf((s.n + 1.0) / 2.0)),
];

/// s(r+s−n)/((r+s)(r+s−1)).
fn hyper_eps1(s: &Snap) -> f64 {
    let t = s.r + s.s;
    s.s * (t - s.n) / (t * (t - 1.0))
}

const COR8_W: [(&str, TermFn); 4] = [
    ("2bε₁/(c√α)", |s| 2.0 * s.b / s.c * hyper_eps1(s) / s.alpha.sqrt()),
    ("3d³/(c³√α)", |s| 3.0 * cube_ratio(s) / s.alpha.sqrt()),
    ("|a|b²ε₁/(c²√α)", |s| s.abs_a() * s.b * s.b / (s.c * s.c) * hyper_eps1(s) / s.alpha.sqrt()),
    (COR8_W_EPS, |s| s.a2() / (s.c * s.c) * sqrt_2_over_pi() * s.eps.sqrt()),
];

const COR8_W_EPS: &str = "a²√(2/π)√ε/c²";
const COR8_K_EPS: &str = "a²√ε/c²";

const COR8_K: [(&str, TermFn); 8] = [
    ("1/√α", |s| 1.0 / s.alpha.sqrt()),
    ("(√2π+4)b√ε₁/(4c√α)", |s| (SQRT_2PI + 4.0) * s.b / (4.0 * s.c) * hyper_eps1(s).sqrt() / s.alpha.sqrt()),
    ("(3√2π/8+9/2√2+5/2)d³/(c³√α)", |s| {
        (3.0 * SQRT_2PI / 8.0 + 4.5 * SQRT_2 + 2.5) * cube_ratio(s) / s.alpha.sqrt()
    }),
    ("(√2π/8+1)|a|b²ε₁/(c³√α)", |s| {
        (SQRT_2PI / 8.0 + 1.0) * s.abs_a() * s.b * s.b / s.c.powi(3) * hyper_eps1(s) / s.alpha.sqrt()
    }),
    ("(|a|b²/(c³√2π) + |a|bd³/c² + b/(c√2π))√(2ε₁)/√α", |s| {
        (s.abs_a() * s.b * s.b / (s.c.powi(3) * SQRT_2PI)
            + s.abs_a() * s.b * s.d3 / (s.c * s.c)
            + s.b / (s.c * SQRT_2PI))
            * (2.0 * hyper_eps1(s)).sqrt()
            / s.alpha.sqrt()
    }),
    ("(s)_n/(r+s)_n", |s| s.p_n0),
    (COR8_K_EPS, |s| s.a2() / (s.c * s.c) * s.eps.sqrt()),
    ("|a|b((s)_n/(r+s)_n·ε₁)^½/c²", |s| s.abs_a() * s.b / (s.c * s.c) * (s.p_n0 * hyper_eps1(s)).sqrt()),
];

fn pair(
    theorem: TheoremId,
    snap: &Snap,
    m: &ModelMoments,
    w: Option<&[(&'static str, TermFn)]>,
    k: Option<&[(&'static str, TermFn)]>,
    w_needs_c: bool,
    constants: &BoundConstants,
) -> Result<BoundPair> {
    let has_c = snap.c > 0.0;
    let report =
        |terms: &[(&'static str, TermFn)], metric| assemble(theorem, metric, snap, terms, inputs(m), *constants);
    let wasserstein = match w {
        Some(t) if has_c || !w_needs_c => Some(report(t, Metric::Wasserstein)?),
        _ => None,
    };
    let kolmogorov = match k {
        Some(t) if has_c => Some(report(t, Metric::Kolmogorov)?),
        _ => None,
    };
    if wasserstein.is_none() && kolmogorov.is_none() {
        return Err(Error::DegenerateSum);
    }
    Ok(BoundPair { wasserstein, kolmogorov })
}

fn wrong_family(theorem: TheoremId, index: &IndexModel) -> Error {
    Error::InvalidParameter(format!("{theorem} does not apply to index {index}"))
}

fn with_functionals(mut r: BoundPair, index: &IndexModel) -> Result<BoundPair> {
    let f = index.functionals()?;
    for rep in [&mut r.wasserstein, &mut r.kolmogorov].into_iter().flatten() {
        rep.inputs.functionals = Some(f);
    }
    Ok(r)
}

/// Evaluates the named corollary for a model of the matching family.
pub fn bound_corollary(
    theorem: TheoremId,
    index: &IndexModel,
    summand: &SummandModel,
    constants: &BoundConstants,
) -> Result<BoundPair> {
    let m = ModelMoments::new(index, summand)?;
    let base = Snap::new(&m, constants);
    match (theorem, index.family()) {
        (TheoremId::Cor3, IndexFamily::Poisson(_) | IndexFamily::NegativeBinomial { .. }) => {
            let snap = base.with_functionals(&index.functionals()?);
            let mut r = pair(theorem, &snap, &m, Some(&COR3_W), Some(&COR3_K), false, constants)?;
            let extra = BoundTerm { label: "E[D²]".into(), value: infdiv_e2(&snap) / (snap.alpha * snap.alpha) };
            for rep in [&mut r.wasserstein, &mut r.kolmogorov].into_iter().flatten() {
                rep.extras.push(extra.clone());
            }
            with_functionals(r, index)
        }
        (TheoremId::Cor4, IndexFamily::Dirac(n)) => {
            if *n == 0 {
                return Err(Error::DegenerateSum);
            }
            let snap = Snap { n: *n as f64, ..base };
            pair(theorem, &snap, &m, Some(&COR4_W), Some(&COR4_K), true, constants)
        }
        (TheoremId::Cor5, IndexFamily::Convolution { base: b, copies }) => {
            let bm = ModelMoments::new(b, summand)?;
            let snap = Snap { n: *copies as f64, ..Snap::new(&bm, constants) };
            let mut r = pair(theorem, &snap, &m, Some(&COR5_W), None, false, constants)?;
            if let Some(w) = r.wasserstein.as_mut() {
                w.extras.push(BoundTerm { label: "α₁".into(), value: bm.index.alpha });
                w.extras.push(BoundTerm { label: "σ₁".into(), value: bm.sum.sigma() });
            }
            Ok(r)
        }
        (TheoremId::Cor6, IndexFamily::Poisson(_)) => {
            pair(theorem, &base, &m, Some(&COR6_W), Some(&COR6_K), false, constants)
        }
        (TheoremId::Cor7, IndexFamily::Binomial { n, p }) => {
            let snap = Snap { n: *n as f64, p: *p, ..base };
            if !(binom_v(&snap) > 0.0) || *p == 0.0 {
                return Err(Error::DegenerateSum);
            }
            pair(theorem, &snap, &m, Some(&COR7_W), Some(&COR7_K), false, constants)
        }
        (TheoremId::Cor8, IndexFamily::Hypergeometric { n, r, s }) => {
            if *n > (*r).min(*s) {
                return Err(Error::InvalidParameter(format!("need n <= min(r, s), got n={n}, r={r}, s={s}")));
            }
            let eps = hyper_eps_f64(*n, *r, *s)?;
            let p0: f64 = (0..*n).map(|j| (*s - j) as f64 / (*r + *s - j) as f64).product();
            let snap = Snap { n: *n as f64, r: *r as f64, s: *s as f64, eps, p_n0: p0, ..base };
            let mut out = pair(theorem, &snap, &m, Some(&COR8_W), Some(&COR8_K), true, constants)?;
            let k_form = constants.hyper_k * ((*r).min(*s) as f64 / (*n as f64 * (*r + *s) as f64)).sqrt();
            for rep in [&mut out.wasserstein, &mut out.kolmogorov].into_iter().flatten() {
                let eps_label = if rep.metric == Metric::Wasserstein { COR8_W_EPS } else { COR8_K_EPS };
                let eps_term = rep.term(eps_label).unwrap_or(0.0);
                let swapped = if eps > 0.0 { eps_term * k_form / eps.sqrt() } else { 0.0 };
                rep.extras.push(BoundTerm { label: "√ε".into(), value: eps.sqrt() });
                rep.extras.push(BoundTerm { label: "K·√(min(r,s)/(n(r+s)))".into(), value: k_form });
                rep.extras.push(BoundTerm { label: "total with K-form".into(), value: rep.total - eps_term + swapped });
            }
            Ok(out)
        }
        (t, _) if t.is_corollary() => Err(wrong_family(t, index)),
        (t, _) => Err(Error::InvalidParameter(format!("{t} is not a corollary"))),
    }
}

/// The corollary matching the index family.
pub fn specialization_for(index: &IndexModel) -> Result<TheoremId> {
    Ok(match index.family() {
        IndexFamily::Dirac(_) => TheoremId::Cor4,
        IndexFamily::Poisson(_) => TheoremId::Cor6,
        IndexFamily::Binomial { .. } => TheoremId::Cor7,
        IndexFamily::Hypergeometric { .. } => TheoremId::Cor8,
        IndexFamily::NegativeBinomial { .. } => TheoremId::Cor3,
        IndexFamily::Convolution { .. } => TheoremId::Cor5,
        IndexFamily::FinitePmf(_) => return Err(Error::NoSpecialization(index.to_string())),
    })
}

/// Closed-form corollary bound for the family of `index`.
pub fn bound_specialized(index: &IndexModel, summand: &SummandModel, constants: &BoundConstants) -> Result<BoundPair> {
    bound_corollary(specialization_for(index)?, index, summand, constants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biasing::{make_coupling, CouplingKind, CouplingStatistics, StatisticsMode};
    use crate::bounds::{bound_kolmogorov_general, bound_kolmogorov_thm3b, bound_wasserstein_thm3a};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn exact_stats(index: &IndexModel) -> CouplingStatistics {
        make_coupling(index, CouplingKind::default_for(index)).unwrap().statistics(StatisticsMode::Exact).unwrap()
    }

    fn summands() -> Vec<SummandModel> {
        vec![
            SummandModel::exponential(1.0).unwrap(),
            SummandModel::uniform(0.0, 1.0).unwrap(),
            SummandModel::uniform(-1.0, 1.0).unwrap(),
            SummandModel::two_point(-1.0, 2.0, 0.3).unwrap(),
            SummandModel::bernoulli(0.5).unwrap(),
        ]
    }

    fn additive(r: &BoundReport) {
        let s: f64 = r.terms.iter().map(|t| t.value).sum();
        assert!((s - r.total).abs() <= 1e-12 * r.total.max(1.0));
        assert!(r.terms.iter().all(|t| t.value >= 0.0));
    }

    #[test]
    fn dirac_matches_theorems() {
        let c = BoundConstants::default();
        for n in [1u64, 16, 250] {
            let index = IndexModel::dirac(n).unwrap();
            let st = exact_stats(&index);
            for x in summands() {
                let m = ModelMoments::new(&index, &x).unwrap();
                let r = bound_specialized(&index, &x, &c).unwrap();
                let (w, k) = (r.wasserstein.unwrap(), r.kolmogorov.unwrap());
                assert_eq!(w.theorem, TheoremId::Cor4);
                assert!(rel(w.total, bound_wasserstein_thm3a(&m, &st).unwrap().total) < 1e-12);
                assert!(rel(k.total, bound_kolmogorov_thm3b(&m, &st, &c).unwrap().total) < 1e-12);
            }
        }
        let x = SummandModel::exponential(1.0).unwrap();
        let t = |n| bound_specialized(&IndexModel::dirac(n).unwrap(), &x, &c).unwrap().wasserstein.unwrap().total;
        assert!(rel(t(4) / t(100), 5.0) < 1e-12);
    }

    #[test]
    fn poisson_matches_thm3a_and_bernoulli_one() {
        let c = BoundConstants::default();
        for lambda in [0.3, 7.0, 120.0] {
            let index = IndexModel::poisson(lambda).unwrap();
            let st = exact_stats(&index);
            for x in summands() {
                let m = ModelMoments::new(&index, &x).unwrap();
                let r = bound_specialized(&index, &x, &c).unwrap();
                let w = r.wasserstein.unwrap();
                additive(&w);
                additive(r.kolmogorov.as_ref().unwrap());
                assert!(rel(w.total, bound_wasserstein_thm3a(&m, &st).unwrap().total) < 1e-12);
            }
            let r = bound_specialized(&index, &SummandModel::bernoulli(1.0).unwrap(), &c).unwrap();
            assert!(rel(r.wasserstein.unwrap().total, 1.0 / lambda.sqrt()) < 1e-12);
            assert!(r.kolmogorov.is_none());
        }
    }

    #[test]
    fn poisson_kolmogorov_dominates_theorem() {
        let c = BoundConstants::default();
        let x = SummandModel::exponential(1.0).unwrap();
        for lambda in [25.0, 100.0, 400.0] {
            let index = IndexModel::poisson(lambda).unwrap();
            let m = ModelMoments::new(&index, &x).unwrap();
            let thm = bound_kolmogorov_thm3b(&m, &exact_stats(&index), &c).unwrap().total;
            let cor = bound_specialized(&index, &x, &c).unwrap().kolmogorov.unwrap().total;
            assert!(thm.is_finite() && cor >= thm, "lambda {lambda}: {cor} < {thm}");
        }
    }

    #[test]
    fn poisson_corollary_decays_in_lambda() {
        let c = BoundConstants::default();
        for x in summands() {
            let mut prev = (f64::INFINITY, f64::INFINITY);
            for i in 0..60 {
                let lambda = 0.2 * 1.2f64.powi(i);
                let r = bound_specialized(&IndexModel::poisson(lambda).unwrap(), &x, &c).unwrap();
                let cur = (r.wasserstein.unwrap().total, r.kolmogorov.unwrap().total);
                assert!(cur.0 <= prev.0 && cur.1 <= prev.1 * (1.0 + 1e-15), "lambda {lambda}");
                prev = cur;
            }
        }
    }

    #[test]
    fn infinitely_divisible_corollary() {
        let c = BoundConstants::default();
        for lambda in [0.5, 4.0, 60.0] {
            let index = IndexModel::poisson(lambda).unwrap();
            let r = bound_corollary(TheoremId::Cor3, &index, &SummandModel::exponential(1.0).unwrap(), &c).unwrap();
            let w = r.wasserstein.unwrap();
            let ed2 = w.extras.iter().find(|e| e.label == "E[D²]").unwrap().value;
            assert!((ed2 - 1.0).abs() < 1e-10, "{ed2}");
        }
        for index in [
            IndexModel::negative_binomial(3.0, 0.4).unwrap(),
            IndexModel::negative_binomial(0.7, 0.2).unwrap(),
            IndexModel::poisson(9.0).unwrap(),
        ] {
            let st = exact_stats(&index);
            for x in summands() {
                let m = ModelMoments::new(&index, &x).unwrap();
                let r = bound_corollary(TheoremId::Cor3, &index, &x, &c).unwrap();
                let (w, k) = (r.wasserstein.unwrap(), r.kolmogorov.unwrap());
                additive(&w);
                additive(&k);
                let ed2 = w.extras[0].value;
                assert!(rel(ed2, st.e_d2) < 1e-8, "{ed2} vs {}", st.e_d2);
                assert!(rel(w.total, bound_wasserstein_thm3a(&m, &st).unwrap().total) < 1e-8);
                assert!(rel(k.total, bound_kolmogorov_thm3b(&m, &st, &c).unwrap().total) < 1e-8);
            }
        }
    }

    #[test]
    fn convolution_scales_with_copies() {
        let c = BoundConstants::default();
        let x = SummandModel::two_point(-1.0, 2.0, 0.3).unwrap();
        let base = IndexModel::binomial(5, 0.4).unwrap();
        let t = |k| {
            let index = IndexModel::convolution(base.clone(), k).unwrap();
            let r = bound_specialized(&index, &x, &c).unwrap();
            assert!(r.kolmogorov.is_none());
            let w = r.wasserstein.unwrap();
            additive(&w);
            w.total
        };
        assert!(rel(t(1) / t(49), 7.0) < 1e-12);
    }

    #[test]
    fn binomial_dominates_theorems() {
        let c = BoundConstants::default();
        for (n, p) in [(50u64, 0.1), (50, 0.5), (200, 0.3), (1000, 0.9), (8, 0.5)] {
            let index = IndexModel::binomial(n, p).unwrap();
            let st = exact_stats(&index);
            for x in summands() {
                let m = ModelMoments::new(&index, &x).unwrap();
                let r = bound_specialized(&index, &x, &c).unwrap();
                let (w, k) = (r.wasserstein.unwrap(), r.kolmogorov.unwrap());
                additive(&w);
                additive(&k);
                let tw = bound_wasserstein_thm3a(&m, &st).unwrap().total;
                assert!(w.total >= tw * (1.0 - 1e-12), "W n={n} p={p}");
                if n >= 50 {
                    assert!(w.total <= 1.1 * tw, "W gap n={n} p={p}: {} vs {tw}", w.total);
                }
                let tk = bound_kolmogorov_thm3b(&m, &st, &c).unwrap().total;
                assert!(k.total >= tk * (1.0 - 1e-12), "K n={n} p={p}: {} < {tk}", k.total);
            }
        }
    }

    #[test]
    fn hypergeometric_dominates_theorems() {
        let c = BoundConstants::default();
        for (n, r, s) in [(10u64, 30u64, 20u64), (20, 40, 40), (5, 6, 9), (40, 50, 200)] {
            let index = IndexModel::hypergeometric(n, r, s).unwrap();
            let st = exact_stats(&index);
            for x in summands() {
                let m = ModelMoments::new(&index, &x).unwrap();
                let rep = bound_specialized(&index, &x, &c).unwrap();
                let (w, k) = (rep.wasserstein.unwrap(), rep.kolmogorov.unwrap());
                additive(&w);
                additive(&k);
                assert_eq!(w.extras.len(), 3);
                let tw = bound_wasserstein_thm3a(&m, &st).unwrap().total;
                assert!(w.total >= tw * (1.0 - 1e-12), "W ({n},{r},{s}) {x:?}: {} < {tw}", w.total);
                let tk = if st.p_dneg > 0.0 {
                    bound_kolmogorov_general(&m, &st, &c).unwrap().total
                } else {
                    bound_kolmogorov_thm3b(&m, &st, &c).unwrap().total
                };
                assert!(k.total >= tk * (1.0 - 1e-12), "K ({n},{r},{s}) {x:?}: {} < {tk}", k.total);
            }
        }
    }

    #[test]
    fn hypergeometric_k_form_extra() {
        let x = SummandModel::exponential(1.0).unwrap();
        let index = IndexModel::hypergeometric(10, 30, 20).unwrap();
        let c = BoundConstants::new(0.4748, true, 2.0).unwrap();
        let k = bound_specialized(&index, &x, &c).unwrap().kolmogorov.unwrap();
        let get = |l: &str| k.extras.iter().find(|e| e.label == l).unwrap().value;
        assert!(rel(get("K·√(min(r,s)/(n(r+s)))"), 2.0 * (20.0f64 / 500.0).sqrt()) < 1e-14);
        let eps_term = k.term(COR8_K_EPS).unwrap();
        let want = k.total - eps_term + eps_term / get("√ε") * get("K·√(min(r,s)/(n(r+s)))");
        assert!(rel(get("total with K-form"), want) < 1e-14);
    }

    #[test]
    fn unsupported_models() {
        let c = BoundConstants::default();
        let x = SummandModel::exponential(1.0).unwrap();
        let bad = IndexModel::hypergeometric(10, 5, 30).unwrap();
        assert!(matches!(bound_specialized(&bad, &x, &c), Err(Error::InvalidParameter(_))));
        let pmf = crate::pmf::DiscretePmf::new(vec![1.0, 3.0], vec![0.5, 0.5], 0.0).unwrap();
        let finite = IndexModel::finite(pmf).unwrap();
        assert!(matches!(bound_specialized(&finite, &x, &c), Err(Error::NoSpecialization(_))));
        let poisson = IndexModel::poisson(3.0).unwrap();
        assert!(bound_corollary(TheoremId::Cor7, &poisson, &x, &c).is_err());
        assert!(bound_corollary(TheoremId::Thm3a, &poisson, &x, &c).is_err());
    }
}
