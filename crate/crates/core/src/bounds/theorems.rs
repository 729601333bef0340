use super::{
    assemble, inputs, require_nondegenerate, BoundConstants, BoundPair, BoundReport, Metric, Snap, TermFn, TheoremId,
};
use crate::biasing::CouplingStatistics;
use crate::error::{Error, Result};
use crate::models::{IndexFunctionals, ModelMoments};
use std::f64::consts::{PI, SQRT_2};

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

pub(crate) fn sqrt_2_over_pi() -> f64 {
    (2.0 / PI).sqrt()
}

const THM3A: [(&str, TermFn); 5] = [
    ("2c²bγ²/σ³", |s| 2.0 * s.c * s.c * s.b * s.gamma2 / s.sigma3()),
    ("3αd³/σ³", |s| 3.0 * s.alpha * s.d3 / s.sigma3()),
    ("(αa²/σ²)√(2/π)√Var(E[D|N])", |s| s.alpha * s.a2() / s.sigma2() * sqrt_2_over_pi() * s.var_cond.sqrt()),
    ("2αa²b/σ³·E[D²1{D<0}]", |s| 2.0 * s.alpha * s.a2() * s.b / s.sigma3() * s.e_d2_neg),
    ("α|a|b²/σ³·E[D²]", |s| s.alpha * s.abs_a() * s.b * s.b / s.sigma3() * s.e_d2),
];

const THM3B: [(&str, TermFn); 12] = [
    ("(√2π+4)bc²α√E[D²]/(4σ³)", |s| {
        (SQRT_2PI + 4.0) * s.b * s.c * s.c * s.alpha / (4.0 * s.sigma3()) * s.e_d2.sqrt()
    }),
    ("d³α(3√2π+4)/(8σ³)", |s| s.d3 * s.alpha * (3.0 * SQRT_2PI + 4.0) / (8.0 * s.sigma3())),
    ("c³α/σ³", |s| s.c.powi(3) * s.alpha / s.sigma3()),
    ("(7/2√2+2)√αd³/(cσ²)", |s| (3.5 * SQRT_2 + 2.0) * s.alpha.sqrt() * s.d3 / (s.c * s.sigma2())),
    ("c²α/σ²·P(N=0)", |s| s.c * s.c * s.alpha / s.sigma2() * s.p_n0),
    ("2C_K d³α/(cσ²)·E[N^-½1{N≥1}]", |s| s.two_ck * s.d3 * s.alpha / (s.c * s.sigma2()) * s.e_ninvhalf),
    ("αa²/σ²·√Var(E[D|N])", |s| s.alpha * s.a2() / s.sigma2() * s.var_cond.sqrt()),
    ("α|a|b²/(2σ³)·√E[E[D²|N]²]", |s| {
        s.alpha * s.abs_a() * s.b * s.b / (2.0 * s.sigma3()) * s.e_cond_d2_sq.sqrt()
    }),
    ("α|a|b²√2π/(8σ³)·E[D²]", |s| s.alpha * s.abs_a() * s.b * s.b * SQRT_2PI / (8.0 * s.sigma3()) * s.e_d2),
    ("α|a|b/σ²·√P(N=0)·√E[D²]", |s| s.alpha * s.abs_a() * s.b / s.sigma2() * s.p_n0.sqrt() * s.e_d2.sqrt()),
    ("α|a|b²/(cσ²√2π)·E[D²N^-½1{N≥1}]", |s| {
        s.alpha * s.abs_a() * s.b * s.b / (s.c * s.sigma2() * SQRT_2PI) * s.e_d2_pos_ninvhalf
    }),
    ("(2C_K d³α|a|b/σ² + αbc/(σ²√2π))·E[DN^-½1{N≥1}]", |s| {
        (s.two_ck * s.d3 * s.alpha * s.abs_a() * s.b / s.sigma2() + s.alpha * s.b * s.c / (s.sigma2() * SQRT_2PI))
            * s.e_d_pos_ninvhalf
    }),
];

/// c²β² + a²(δ³ − 2αβ² + α³) = σ² E[W²_{N^s}] / α.
fn second_moment_factor(s: &Snap) -> f64 {
    s.c * s.c * s.beta2 + s.a2() * (s.delta3 - 2.0 * s.alpha * s.beta2 + s.alpha.powi(3))
}

fn b1(s: &Snap) -> f64 {
    THM3B[..3].iter().map(|(_, f)| f(s)).sum()
}

fn b2(s: &Snap) -> f64 {
    let cs2 = s.c * s.sigma2();
    (3.5 * SQRT_2 + 2.0) * s.alpha.sqrt() * s.d3 / cs2
        + s.c * s.c * s.alpha / s.sigma2() * s.p_n0
        + s.alpha * s.b * s.c / (s.sigma2() * SQRT_2PI) * s.e_d_pos_ninvhalf
        + s.two_ck * s.d3 * s.alpha / cs2 * s.e_pos_ninvhalf
        + s.c * s.b * s.alpha.sqrt() / (s.sigma2() * SQRT_2PI) * s.e_d2_neg.sqrt()
        + s.alpha * s.ck * s.d3 / cs2 * s.p_dneg.sqrt()
}

fn b3(s: &Snap) -> f64 {
    s.alpha * s.a2() / s.sigma2() * s.var_cond.sqrt()
}

fn b4(s: &Snap) -> f64 {
    s.alpha * s.a2() * s.b / (s.sigma2() * s.c * SQRT_2PI) * s.e_d2_neg_nsinvhalf
        + s.two_ck * s.d3 * s.a2() * s.alpha.sqrt() / (s.c.powi(3) * s.sigma2()) * s.e_d2_neg.sqrt()
}

fn b5(s: &Snap) -> f64 {
    s.alpha * s.a2() * s.b * SQRT_2PI / (4.0 * s.sigma3()) * s.e_d2_neg
        + s.a2() * s.b * second_moment_factor(s) / s.sigma.powi(5) * s.e_cond_d2_neg_sq.sqrt()
}

fn b6(s: &Snap) -> f64 {
    let ab2 = s.alpha * s.abs_a() * s.b * s.b;
    ab2 / (2.0 * s.sigma3()) * s.e_cond_d2_sq.sqrt()
        + ab2 * SQRT_2PI / (8.0 * s.sigma3()) * s.e_d2_pos
        + s.alpha * s.abs_a() * s.b / s.sigma2() * s.p_n0.sqrt() * s.e_d2_pos.sqrt()
        + ab2 / (s.c * s.sigma2() * SQRT_2PI) * s.e_d2_pos_ninvhalf
        + s.two_ck * s.d3 * s.alpha * s.abs_a() * s.b / s.sigma2() * s.e_d_pos_ninvhalf
}

fn b7(s: &Snap) -> f64 {
    let ab2 = s.alpha * s.abs_a() * s.b * s.b;
    ab2 * SQRT_2PI / (8.0 * s.sigma3()) * s.e_d2_neg
        + ab2 / (2.0 * s.sigma3())
            * s.e_cond_d2_neg_sq.sqrt()
            * (second_moment_factor(s) / (s.alpha * s.sigma2())).sqrt()
        + ab2 / (s.sigma2() * s.c * SQRT_2PI) * s.e_d2_neg_nsinvhalf
        + s.alpha.sqrt() * s.abs_a() * s.two_ck * s.b * s.d3 / s.sigma2() * s.e_d2_neg.sqrt()
}

const GENERAL: [(&str, TermFn); 7] =
    [("B1", b1), ("B2", b2), ("B3", b3), ("B4", b4), ("B5", b5), ("B6", b6), ("B7", b7)];

const THM5_W: [(&str, TermFn); 2] =
    [("2γ/α", |s| 2.0 * s.gamma() / s.alpha), ("3d³/(c³√α)", |s| 3.0 * s.d3 / (s.c.powi(3) * s.alpha.sqrt()))];

const THM5_K: [(&str, TermFn); 5] = [
    ("(√2π+4)γ/(4α)", |s| (SQRT_2PI + 4.0) * s.gamma() / (4.0 * s.alpha)),
    ("(d³(3√2π+4)/(8c³)+1)/√α", |s| {
        (s.d3 * (3.0 * SQRT_2PI + 4.0) / (8.0 * s.c.powi(3)) + 1.0) / s.alpha.sqrt()
    }),
    ("(7/2√2+2)d³/(c³α)", |s| (3.5 * SQRT_2 + 2.0) * s.d3 / (s.c.powi(3) * s.alpha)),
    ("P(N=0)", |s| s.p_n0),
    ("(2C_K d³/c³ + γ/(√α√2π))√E[N^-1 1{N≥1}]", |s| {
        (s.two_ck * s.d3 / s.c.powi(3) + s.gamma() / (s.alpha.sqrt() * SQRT_2PI)) * s.e_ninv.sqrt()
    }),
];

fn with_stats(
    m: &ModelMoments,
    st: &CouplingStatistics,
    constants: &BoundConstants,
) -> Result<(Snap, super::BoundInputs)> {
    st.check_finite()?;
    let snap = Snap::new(m, constants).with_statistics(st);
    let mut inp = inputs(m);
    inp.statistics = Some(st.clone());
    Ok((snap, inp))
}

/// Wasserstein bound from the size-bias coupling statistics of the index.
pub fn bound_wasserstein_thm3a(m: &ModelMoments, st: &CouplingStatistics) -> Result<BoundReport> {
    if !(m.sum.sigma2 > 0.0) {
        return Err(Error::DegenerateSum);
    }
    let constants = BoundConstants::default();
    let (snap, inp) = with_stats(m, st, &constants)?;
    assemble(TheoremId::Thm3a, Metric::Wasserstein, &snap, &THM3A, inp, constants)
}

/// Kolmogorov bound for couplings with `D >= 0`.
pub fn bound_kolmogorov_thm3b(
    m: &ModelMoments,
    st: &CouplingStatistics,
    constants: &BoundConstants,
) -> Result<BoundReport> {
    require_nondegenerate(m)?;
    if st.p_dneg > 0.0 {
        return Err(Error::NegativeDPresent(st.p_dneg));
    }
    let (snap, inp) = with_stats(m, st, constants)?;
    assemble(TheoremId::Thm3b, Metric::Kolmogorov, &snap, &THM3B, inp, *constants)
}

/// Kolmogorov bound `B1 + ... + B7` valid for any coupling.
pub fn bound_kolmogorov_general(
    m: &ModelMoments,
    st: &CouplingStatistics,
    constants: &BoundConstants,
) -> Result<BoundReport> {
    require_nondegenerate(m)?;
    let (snap, inp) = with_stats(m, st, constants)?;
    assemble(TheoremId::General, Metric::Kolmogorov, &snap, &GENERAL, inp, *constants)
}

/// Both bounds for centered summands.
pub fn bound_meanzero_thm5(
    m: &ModelMoments,
    functionals: &IndexFunctionals,
    constants: &BoundConstants,
) -> Result<BoundPair> {
    let scale = m.summand.b2.sqrt().max(f64::MIN_POSITIVE);
    if m.summand.a.abs() > 1e-12 * scale {
        return Err(Error::NonzeroMean(m.summand.a));
    }
    require_nondegenerate(m)?;
    let snap = Snap::new(m, constants).with_functionals(functionals);
    let mut inp = inputs(m);
    inp.functionals = Some(*functionals);
    let w = assemble(TheoremId::Thm5, Metric::Wasserstein, &snap, &THM5_W, inp.clone(), *constants)?;
    let k = assemble(TheoremId::Thm5, Metric::Kolmogorov, &snap, &THM5_K, inp, *constants)?;
    Ok(BoundPair { wasserstein: Some(w), kolmogorov: Some(k) })
}
