//! Error bounds for the normal approximation of standardized random sums,
//! evaluated term by term.

mod corollaries;
mod hyper;
mod theorems;

pub use corollaries::{bound_corollary, bound_specialized, specialization_for};
pub use hyper::{hyper_eps, hyper_eps_f64};
pub use theorems::{bound_kolmogorov_general, bound_kolmogorov_thm3b, bound_meanzero_thm5, bound_wasserstein_thm3a};

use crate::biasing::CouplingStatistics;
use crate::error::{Error, Result};
use crate::models::{
    IndexFunctionals, IndexModel, IndexMoments, ModelMoments, RandomSumMoments, SummandModel, SummandMoments,
};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Upper estimate of the Berry-Esseen constant for i.i.d. sums.
pub const BERRY_ESSEEN_CK: f64 = 0.4748;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub c_k: f64,
    /// Replace 2 C_K by 1 wherever it appears.
    pub use_2ck_as_one: bool,
    /// The unspecified numerical constant of the hypergeometric corollary.
    pub hyper_k: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self { c_k: BERRY_ESSEEN_CK, use_2ck_as_one: true, hyper_k: 1.0 }
    }
}

impl BoundConstants {
    pub fn new(c_k: f64, use_2ck_as_one: bool, hyper_k: f64) -> Result<Self> {
        if !(c_k > 0.0 && c_k <= 0.5) {
            return Err(Error::InvalidParameter(format!("c_k must lie in (0, 0.5], got {c_k}")));
        }
        if !(hyper_k > 0.0 && hyper_k.is_finite()) {
            return Err(Error::InvalidParameter("hyper_k must be positive".into()));
        }
        Ok(Self { c_k, use_2ck_as_one, hyper_k })
    }

    pub fn two_ck(&self) -> f64 {
        if self.use_2ck_as_one {
            1.0
        } else {
            2.0 * self.c_k
        }
    }

    pub fn ck(&self) -> f64 {
        0.5 * self.two_ck()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Thm3a,
    Thm3b,
    General,
    Thm5,
    Cor3,
    Cor4,
    Cor5,
    Cor6,
    Cor7,
    Cor8,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::Thm3a,
        TheoremId::Thm3b,
        TheoremId::General,
        TheoremId::Thm5,
        TheoremId::Cor3,
        TheoremId::Cor4,
        TheoremId::Cor5,
        TheoremId::Cor6,
        TheoremId::Cor7,
        TheoremId::Cor8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Thm3a => "thm3a",
            TheoremId::Thm3b => "thm3b",
            TheoremId::General => "general",
            TheoremId::Thm5 => "thm5",
            TheoremId::Cor3 => "cor3",
            TheoremId::Cor4 => "cor4",
            TheoremId::Cor5 => "cor5",
            TheoremId::Cor6 => "cor6",
            TheoremId::Cor7 => "cor7",
            TheoremId::Cor8 => "cor8",
        }
    }

    pub fn is_corollary(self) -> bool {
        matches!(
            self,
            TheoremId::Cor3 | TheoremId::Cor4 | TheoremId::Cor5 | TheoremId::Cor6 | TheoremId::Cor7 | TheoremId::Cor8
        )
    }

    /// Whether the bound is stated for `metric`.
    pub fn supports(self, metric: Metric) -> bool {
        match self {
            TheoremId::Thm3a | TheoremId::Cor5 => metric == Metric::Wasserstein,
            TheoremId::Thm3b | TheoremId::General => metric == Metric::Kolmogorov,
            _ => true,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| Error::Parse(format!("unknown theorem '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Wasserstein,
    Kolmogorov,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Wasserstein => "wasserstein",
            Metric::Kolmogorov => "kolmogorov",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wasserstein" | "w" => Ok(Metric::Wasserstein),
            "kolmogorov" | "k" => Ok(Metric::Kolmogorov),
            _ => Err(Error::Parse(format!("unknown metric '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerm {
    pub label: String,
    pub value: f64,
}

/// Everything a bound was evaluated from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundInputs {
    pub index: IndexMoments,
    pub summand: SummandMoments,
    pub sum: RandomSumMoments,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistics: Option<CouplingStatistics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functionals: Option<IndexFunctionals>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub metric: Metric,
    pub total: f64,
    pub terms: Vec<BoundTerm>,
    pub inputs: BoundInputs,
    pub constants: BoundConstants,
    /// Auxiliary quantities that are not part of the total.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extras: Vec<BoundTerm>,
}

/// Wasserstein and Kolmogorov reports of one bound; a metric is `None` when
/// the bound is not stated for it or needs `c > 0` and the summand is constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundPair {
    pub wasserstein: Option<BoundReport>,
    pub kolmogorov: Option<BoundReport>,
}

impl BoundPair {
    pub fn get(&self, metric: Metric) -> Option<&BoundReport> {
        match metric {
            Metric::Wasserstein => self.wasserstein.as_ref(),
            Metric::Kolmogorov => self.kolmogorov.as_ref(),
        }
    }

    pub fn into_metric(self, metric: Metric) -> Option<BoundReport> {
        match metric {
            Metric::Wasserstein => self.wasserstein,
            Metric::Kolmogorov => self.kolmogorov,
        }
    }
}

impl BoundReport {
    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.label == label).map(|t| t.value)
    }
}

/// Flat snapshot of every quantity any bound reads.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Snap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d3: f64,
    pub alpha: f64,
    pub beta2: f64,
    pub gamma2: f64,
    pub delta3: f64,
    pub sigma: f64,
    pub two_ck: f64,
    pub ck: f64,
    // coupling statistics
    pub e_d2: f64,
    pub e_d2_neg: f64,
    pub e_d2_pos: f64,
    pub var_cond: f64,
    pub e_cond_d2_sq: f64,
    pub e_cond_d2_neg_sq: f64,
    pub p_n0: f64,
    pub p_dneg: f64,
    pub e_d_pos_ninvhalf: f64,
    pub e_d2_pos_ninvhalf: f64,
    pub e_pos_ninvhalf: f64,
    pub e_ninvhalf: f64,
    pub e_d2_neg_nsinvhalf: f64,
    // index functionals
    pub e_ninv: f64,
    // family parameters used by the corollaries
    pub n: f64,
    pub p: f64,
    pub r: f64,
    pub s: f64,
    pub eps: f64,
}

impl Snap {
    pub fn abs_a(&self) -> f64 {
        self.a.abs()
    }
    pub fn a2(&self) -> f64 {
        self.a * self.a
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }
    pub fn sigma3(&self) -> f64 {
        self.sigma.powi(3)
    }
    pub fn gamma(&self) -> f64 {
        self.gamma2.sqrt()
    }

    pub fn new(m: &ModelMoments, constants: &BoundConstants) -> Self {
        Self {
            a: m.summand.a,
            b: m.summand.b(),
            c: m.summand.c(),
            d3: m.summand.d3,
            alpha: m.index.alpha,
            beta2: m.index.beta2,
            gamma2: m.index.gamma2,
            delta3: m.index.delta3,
            sigma: m.sum.sigma(),
            two_ck: constants.two_ck(),
            ck: constants.ck(),
            ..Self::default()
        }
    }

    pub fn with_statistics(mut self, st: &CouplingStatistics) -> Self {
        self.e_d2 = st.e_d2;
        self.e_d2_neg = st.e_d2_neg;
        self.e_d2_pos = st.e_d2_pos();
        self.var_cond = st.var_cond;
        self.e_cond_d2_sq = st.e_cond_d2_sq;
        self.e_cond_d2_neg_sq = st.e_cond_d2_neg_sq;
        self.p_n0 = st.p_n0;
        self.p_dneg = st.p_dneg;
        self.e_d_pos_ninvhalf = st.e_d_pos_ninvhalf;
        self.e_d2_pos_ninvhalf = st.e_d2_pos_ninvhalf;
        self.e_pos_ninvhalf = st.e_pos_ninvhalf;
        self.e_ninvhalf = st.e_ninvhalf;
        self.e_d2_neg_nsinvhalf = st.e_d2_neg_nsinvhalf;
        self
    }

    pub fn with_functionals(mut self, f: &IndexFunctionals) -> Self {
        self.p_n0 = f.p_n0;
        self.e_ninv = f.e_ninv;
        self.e_ninvhalf = f.e_ninvhalf;
        self
    }
}

pub(crate) type TermFn = fn(&Snap) -> f64;

/// Evaluates named terms and sums them in order.
pub(crate) fn assemble(
    theorem: TheoremId,
    metric: Metric,
    snap: &Snap,
    terms: &[(&str, TermFn)],
    inputs: BoundInputs,
    constants: BoundConstants,
) -> Result<BoundReport> {
    let mut out = Vec::with_capacity(terms.len());
    for (label, f) in terms {
        let value = f(snap);
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("{theorem} term {label} is not finite")));
        }
        // clamp round-off from differences of nonnegative quantities
        out.push(BoundTerm { label: label.to_string(), value: value.max(0.0) });
    }
    let total = out.iter().map(|t| t.value).sum();
    Ok(BoundReport { theorem, metric, total, terms: out, inputs, constants, extras: Vec::new() })
}

pub(crate) fn inputs(m: &ModelMoments) -> BoundInputs {
    BoundInputs { index: m.index, summand: m.summand, sum: m.sum, statistics: None, functionals: None }
}

pub(crate) fn require_nondegenerate(m: &ModelMoments) -> Result<()> {
    if !(m.summand.c2 > 0.0) {
        return Err(Error::DegenerateSum);
    }
    Ok(())
}

/// Evaluates one bound for one metric. Theorem-level bounds read `stats`;
/// the mean-zero bound and the corollaries work from the models alone.
pub fn evaluate(
    theorem: TheoremId,
    metric: Metric,
    index: &IndexModel,
    summand: &SummandModel,
    stats: Option<&CouplingStatistics>,
    constants: &BoundConstants,
) -> Result<BoundReport> {
    if !theorem.supports(metric) {
        return Err(Error::InvalidParameter(format!("{theorem} gives no {metric} bound")));
    }
    let m = ModelMoments::new(index, summand)?;
    let need = || stats.ok_or(Error::MissingStatistic("coupling statistics"));
    match theorem {
        TheoremId::Thm3a => bound_wasserstein_thm3a(&m, need()?),
        TheoremId::Thm3b => bound_kolmogorov_thm3b(&m, need()?, constants),
        TheoremId::General => bound_kolmogorov_general(&m, need()?, constants),
        TheoremId::Thm5 => {
            bound_meanzero_thm5(&m, &index.functionals()?, constants)?.into_metric(metric).ok_or(Error::DegenerateSum)
        }
        _ => bound_corollary(theorem, index, summand, constants)?.into_metric(metric).ok_or(Error::DegenerateSum),
    }
}
