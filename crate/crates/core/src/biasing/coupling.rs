use super::size_bias::size_bias_pmf;
use crate::error::{Error, Result};
use crate::models::{IndexFamily, IndexModel, IndexSampler, DEFAULT_TAIL_TOL};
use crate::pmf::{DiscretePmf, PmfSampler};
use crate::rng::RandomStream;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Largest joint support enumerated for exact statistics.
pub const MAX_JOINT_ATOMS: usize = 5_000_000;

const BATCHES: u64 = 20;

/// Built-in constructions of a size-biased companion N^s for N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    PoissonShift,
    BinomialDropOne,
    HypergeometricMarkedBall,
    Quantile,
    DiracIdentity,
    InfdivIncrement,
    ConvolutionSingleIndex,
    /// A joint pmf read from a file.
    UserJoint,
}

impl CouplingKind {
    pub const BUILT_IN: [CouplingKind; 7] = [
        CouplingKind::PoissonShift,
        CouplingKind::BinomialDropOne,
        CouplingKind::HypergeometricMarkedBall,
        CouplingKind::Quantile,
        CouplingKind::DiracIdentity,
        CouplingKind::InfdivIncrement,
        CouplingKind::ConvolutionSingleIndex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CouplingKind::PoissonShift => "poisson-shift",
            CouplingKind::BinomialDropOne => "drop-one",
            CouplingKind::HypergeometricMarkedBall => "marked-ball",
            CouplingKind::Quantile => "quantile",
            CouplingKind::DiracIdentity => "identity",
            CouplingKind::InfdivIncrement => "infdiv",
            CouplingKind::ConvolutionSingleIndex => "conv-single",
            CouplingKind::UserJoint => "joint",
        }
    }

    /// The family-specific construction, falling back to the quantile coupling.
    pub fn default_for(index: &IndexModel) -> Self {
        match index.family() {
            IndexFamily::Dirac(_) => CouplingKind::DiracIdentity,
            IndexFamily::Poisson(_) => CouplingKind::PoissonShift,
            IndexFamily::Binomial { .. } => CouplingKind::BinomialDropOne,
            IndexFamily::Hypergeometric { .. } => CouplingKind::HypergeometricMarkedBall,
            IndexFamily::NegativeBinomial { .. } => CouplingKind::InfdivIncrement,
            IndexFamily::Convolution { .. } | IndexFamily::FinitePmf(_) => CouplingKind::Quantile,
        }
    }
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CouplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::BUILT_IN
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown coupling kind '{s}'")))
    }
}

/// One atom of the joint law of (N, N^s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointAtom {
    pub n: u64,
    pub ns: u64,
    pub prob: f64,
}

impl JointAtom {
    pub fn d(&self) -> i64 {
        self.ns as i64 - self.n as i64
    }
}

/// Finite joint pmf of (N, N^s), atoms sorted by (n, n_s).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf {
    atoms: Vec<JointAtom>,
    tail_defect: f64,
}

impl JointPmf {
    /// Merges duplicate cells, drops null ones and normalizes to total mass 1.
    pub fn from_atoms(atoms: impl IntoIterator<Item = JointAtom>, tail_defect: f64) -> Result<Self> {
        let mut cells: BTreeMap<(u64, u64), f64> = BTreeMap::new();
        for a in atoms {
            if !(a.prob.is_finite() && a.prob >= 0.0) {
                return Err(Error::InvalidParameter(format!("bad joint probability {}", a.prob)));
            }
            *cells.entry((a.n, a.ns)).or_insert(0.0) += a.prob;
        }
        let total: f64 = cells.values().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("joint pmf sums to {total}")));
        }
        let atoms = cells
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|((n, ns), p)| JointAtom { n, ns, prob: p / total })
            .collect();
        Ok(Self { atoms, tail_defect })
    }

    pub fn atoms(&self) -> &[JointAtom] {
        &self.atoms
    }

    pub fn tail_defect(&self) -> f64 {
        self.tail_defect
    }

    pub fn marginal_n(&self) -> Result<DiscretePmf> {
        DiscretePmf::from_weights(self.atoms.iter().map(|a| (a.n as f64, a.prob)), 0.0)
    }

    pub fn marginal_ns(&self) -> Result<DiscretePmf> {
        DiscretePmf::from_weights(self.atoms.iter().map(|a| (a.ns as f64, a.prob)), 0.0)
    }

    /// Law of D = N^s - N.
    pub fn increment_law(&self) -> Result<DiscretePmf> {
        DiscretePmf::from_weights(self.atoms.iter().map(|a| (a.d() as f64, a.prob)), 0.0)
    }
}

/// Parses an `n,n_s,probability` CSV (header optional).
pub fn read_joint_csv(text: &str) -> Result<JointPmf> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut atoms = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != 3 {
            return Err(Error::Parse(format!("row {}: expected n,n_s,probability", line + 1)));
        }
        let n = rec[0].parse::<u64>();
        let ns = rec[1].parse::<u64>();
        let p = rec[2].parse::<f64>();
        let (n, ns, prob) = match (n, ns, p) {
            (Ok(n), Ok(ns), Ok(p)) => (n, ns, p),
            _ if line == 0 => continue,
            _ => return Err(Error::Parse(format!("row {}: not a number", line + 1))),
        };
        if !seen.insert((n, ns)) {
            return Err(Error::Parse(format!("duplicate cell ({n}, {ns})")));
        }
        atoms.push(JointAtom { n, ns, prob });
    }
    let total: f64 = atoms.iter().map(|a| a.prob).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Parse(format!("probabilities sum to {total}, not 1")));
    }
    JointPmf::from_atoms(atoms, 0.0)
}

#[derive(Debug, Clone)]
enum PairSampler {
    Shift(IndexSampler),
    DropOne { p: f64, rest: Binomial },
    MarkedBall { n: u64, r: u64, s: u64 },
    Quantile { n_support: Vec<u64>, n_cdf: Vec<f64>, s_support: Vec<u64>, s_cdf: Vec<f64> },
    Identity(u64),
    Increment { index: IndexSampler, increment: PmfSampler },
    ConvSingle { base: IndexSampler, rest_copies: u64, base_biased: PmfSampler },
    Table { cells: Vec<(u64, u64)>, cdf: Vec<f64> },
}

fn cdf_table(probs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let total = acc;
    for c in cdf.iter_mut() {
        *c /= total;
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

fn inverse(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c < u).min(cdf.len() - 1)
}

/// One urn experiment: `n` draws without replacement from `r` red balls
/// (one of them marked) and `s` silver balls. Returns (N, N^s).
fn marked_ball_pair<R: Rng + ?Sized>(n: u64, r: u64, s: u64, rng: &mut R) -> (u64, u64) {
    let (mut red, mut total) = (r, r + s);
    let mut marked_left = true;
    let mut count = 0u64;
    let mut first_red = false;
    let mut marked_later = false;
    for j in 0..n {
        let is_red = rng.random_range(0..total) < red;
        if is_red {
            let is_marked = marked_left && rng.random_range(0..red) == 0;
            if is_marked {
                marked_left = false;
                if j > 0 {
                    marked_later = true;
                }
            }
            if j == 0 {
                first_red = true;
            }
            red -= 1;
            count += 1;
        }
        total -= 1;
    }
    let ns = if first_red { count } else { count + 1 - marked_later as u64 };
    (count, ns)
}

impl PairSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        match self {
            PairSampler::Shift(s) => {
                let n = s.sample(rng);
                (n, n + 1)
            }
            PairSampler::DropOne { p, rest } => {
                let r = rest.sample(rng);
                let x1 = (rng.random::<f64>() < *p) as u64;
                (x1 + r, r + 1)
            }
            PairSampler::MarkedBall { n, r, s } => marked_ball_pair(*n, *r, *s, rng),
            PairSampler::Quantile { n_support, n_cdf, s_support, s_cdf } => {
                let u: f64 = rng.random();
                let n = n_support[inverse(n_cdf, u)];
                let ns = s_support[inverse(s_cdf, u)];
                (n, ns.max(n))
            }
            PairSampler::Identity(n) => (*n, *n),
            PairSampler::Increment { index, increment } => {
                let n = index.sample(rng);
                (n, n + increment.sample(rng) as u64)
            }
            PairSampler::ConvSingle { base, rest_copies, base_biased } => {
                let rest: u64 = (0..*rest_copies).map(|_| base.sample(rng)).sum();
                let n1 = base.sample(rng);
                let m1 = base_biased.sample(rng) as u64;
                (n1 + rest, m1 + rest)
            }
            PairSampler::Table { cells, cdf } => cells[inverse(cdf, rng.random())],
        }
    }
}

/// A size-bias coupling (N, N^s).
#[derive(Debug, Clone)]
pub struct SizeBiasCoupling {
    kind: CouplingKind,
    index: IndexModel,
    sampler: PairSampler,
    joint: Option<JointPmf>,
}

fn incompatible(kind: CouplingKind, index: &IndexModel) -> Error {
    Error::IncompatibleKind { kind: kind.name().to_string(), index: index.to_string() }
}

fn as_u64(x: f64) -> u64 {
    x.round() as u64
}

/// Comonotone joint law of two pmfs on the integers under one uniform.
fn quantile_joint(p: &DiscretePmf, q: &DiscretePmf) -> Result<Vec<JointAtom>> {
    let fp = p.normalized_cdf_table();
    let fq = q.normalized_cdf_table();
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    let mut atoms = Vec::new();
    while i < fp.len() && j < fq.len() {
        let next = fp[i].min(fq[j]);
        let mass = next - prev;
        if mass > 0.0 {
            let (n, ns) = (as_u64(p.support()[i]), as_u64(q.support()[j]));
            if ns < n {
                // only rounding in the cumulative sums can cross the diagonal
                if mass > 1e-12 {
                    return Err(Error::InvalidParameter("quantile coupling crossed the diagonal".into()));
                }
            } else {
                atoms.push(JointAtom { n, ns, prob: mass });
            }
        }
        prev = next;
        if fp[i] <= next {
            i += 1;
        }
        if fq[j] <= next {
            j += 1;
        }
    }
    Ok(atoms)
}

/// Solves q_s = p * q_D for the increment law q_D on the truncated support.
fn deconvolve_increment(p: &DiscretePmf, q: &DiscretePmf) -> Result<DiscretePmf> {
    let dense = |pmf: &DiscretePmf| {
        let top = as_u64(*pmf.support().last().unwrap()) as usize;
        let mut v = vec![0.0; top + 1];
        for (k, pk) in pmf.iter() {
            v[as_u64(k) as usize] = pk;
        }
        v
    };
    let pd = dense(p);
    let qd = dense(q);
    if pd[0] <= 0.0 {
        return Err(Error::Deconvolution("P(N=0) must be positive".into()));
    }
    let mut out: Vec<f64> = Vec::with_capacity(qd.len());
    let mut mass = 0.0;
    for k in 0..qd.len() {
        let conv: f64 = (0..k).filter(|&d| k - d < pd.len()).map(|d| out[d] * pd[k - d]).sum();
        let v = (qd[k] - conv) / pd[0];
        if v < -1e-9 {
            return Err(Error::Deconvolution(format!("negative increment mass {v:e} at {k}")));
        }
        let v = v.max(0.0);
        out.push(v);
        mass += v;
        if 1.0 - mass < DEFAULT_TAIL_TOL {
            break;
        }
    }
    if (mass - 1.0).abs() > 1e-8 {
        return Err(Error::Deconvolution(format!("increment law has mass {mass}")));
    }
    DiscretePmf::from_weights(out.into_iter().enumerate().map(|(d, v)| (d as f64, v)), 0.0)
}

fn product_atoms(p: &DiscretePmf, q: &DiscretePmf, f: impl Fn(u64, u64) -> (u64, u64)) -> Vec<JointAtom> {
    let mut atoms = Vec::with_capacity(p.len() * q.len());
    for (x, px) in p.iter() {
        for (y, qy) in q.iter() {
            let (n, ns) = f(as_u64(x), as_u64(y));
            atoms.push(JointAtom { n, ns, prob: px * qy });
        }
    }
    atoms
}

impl SizeBiasCoupling {
    pub fn new(index: &IndexModel, kind: CouplingKind) -> Result<Self> {
        if !(index.moments().alpha > 0.0) {
            return Err(Error::ZeroMean);
        }
        let pmf = index.materialize_pmf(DEFAULT_TAIL_TOL);
        let defect = pmf.as_ref().map(|p| p.tail_defect()).unwrap_or(0.0);
        let (sampler, atoms): (PairSampler, Option<Vec<JointAtom>>) = match (kind, index.family()) {
            (CouplingKind::DiracIdentity, IndexFamily::Dirac(n)) => {
                (PairSampler::Identity(*n), Some(vec![JointAtom { n: *n, ns: *n, prob: 1.0 }]))
            }
            (CouplingKind::PoissonShift, IndexFamily::Poisson(_))
            | (CouplingKind::InfdivIncrement, IndexFamily::Poisson(_)) => {
                let atoms = pmf
                    .ok()
                    .map(|p| p.iter().map(|(k, pk)| JointAtom { n: as_u64(k), ns: as_u64(k) + 1, prob: pk }).collect());
                (PairSampler::Shift(index.sampler()), atoms)
            }
            (CouplingKind::BinomialDropOne, IndexFamily::Binomial { n, p }) => {
                let rest_model = IndexModel::binomial(n - 1, *p)?;
                let rest = rest_model.materialize_pmf(DEFAULT_TAIL_TOL)?;
                let x1 = DiscretePmf::from_weights([(0.0, 1.0 - p), (1.0, *p)], 0.0)?;
                let atoms = product_atoms(&x1, &rest, |x, r| (x + r, r + 1));
                let rest = Binomial::new(n - 1, *p).expect("validated");
                (PairSampler::DropOne { p: *p, rest }, Some(atoms))
            }
            (CouplingKind::HypergeometricMarkedBall, IndexFamily::Hypergeometric { n, r, s }) => {
                let (n, r, s) = (*n, *r, *s);
                let atoms = pmf.ok().map(|p| {
                    let mut atoms = Vec::new();
                    for (k, pk) in p.iter() {
                        let t = (n as f64 - k) * (r as f64 - k) / (n as f64 * r as f64);
                        let k = as_u64(k);
                        atoms.push(JointAtom { n: k, ns: k, prob: pk * (1.0 - t) });
                        atoms.push(JointAtom { n: k, ns: k + 1, prob: pk * t });
                    }
                    atoms
                });
                (PairSampler::MarkedBall { n, r, s }, atoms)
            }
            (CouplingKind::Quantile, _) => {
                let p = pmf?;
                let q = size_bias_pmf(&p)?;
                let atoms = quantile_joint(&p, &q)?;
                let ints = |pmf: &DiscretePmf| pmf.support().iter().map(|&x| as_u64(x)).collect::<Vec<_>>();
                let sampler = PairSampler::Quantile {
                    n_support: ints(&p),
                    n_cdf: p.normalized_cdf_table(),
                    s_support: ints(&q),
                    s_cdf: q.normalized_cdf_table(),
                };
                (sampler, Some(atoms))
            }
            (CouplingKind::InfdivIncrement, IndexFamily::NegativeBinomial { .. }) => {
                let p = pmf?;
                let q = size_bias_pmf(&p)?;
                let inc = deconvolve_increment(&p, &q)?;
                let atoms = product_atoms(&p, &inc, |n, d| (n, n + d));
                (PairSampler::Increment { index: index.sampler(), increment: PmfSampler::new(&inc) }, Some(atoms))
            }
            (CouplingKind::ConvolutionSingleIndex, IndexFamily::Convolution { base, copies }) => {
                let b = base.materialize_pmf(DEFAULT_TAIL_TOL / *copies as f64)?;
                let bq = size_bias_pmf(&b)?;
                let rest = if *copies > 1 {
                    IndexModel::convolution((**base).clone(), copies - 1)?.materialize_pmf(DEFAULT_TAIL_TOL)?
                } else {
                    DiscretePmf::point_mass(0.0)
                };
                let atoms = if b.len() * bq.len() * rest.len() <= MAX_JOINT_ATOMS {
                    let pairs = product_atoms(&b, &bq, |x, y| (x, y));
                    let mut atoms = Vec::with_capacity(pairs.len() * rest.len());
                    for a in &pairs {
                        for (r, pr) in rest.iter() {
                            let r = as_u64(r);
                            atoms.push(JointAtom { n: a.n + r, ns: a.ns + r, prob: a.prob * pr });
                        }
                    }
                    Some(atoms)
                } else {
                    None
                };
                let sampler = PairSampler::ConvSingle {
                    base: base.sampler(),
                    rest_copies: copies - 1,
                    base_biased: PmfSampler::new(&bq),
                };
                (sampler, atoms)
            }
            _ => return Err(incompatible(kind, index)),
        };
        let joint = match atoms {
            Some(a) if a.len() <= MAX_JOINT_ATOMS => Some(JointPmf::from_atoms(a, defect)?),
            _ => None,
        };
        Ok(Self { kind, index: index.clone(), sampler, joint })
    }

    /// Coupling from a user-supplied joint pmf. The second marginal must be
    /// the size-biased first marginal.
    pub fn from_joint(joint: JointPmf) -> Result<Self> {
        let pn = joint.marginal_n()?;
        let expected = size_bias_pmf(&pn)?;
        let got = joint.marginal_ns()?;
        let mut keys: Vec<f64> = expected.support().iter().chain(got.support()).copied().collect();
        keys.sort_by(f64::total_cmp);
        keys.dedup();
        for k in keys {
            let (e, g) = (expected.prob_at(k), got.prob_at(k));
            if (e - g).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("second marginal is not size-biased at {k}: {g} vs {e}")));
            }
        }
        let index = IndexModel::finite(pn)?;
        let cells = joint.atoms().iter().map(|a| (a.n, a.ns)).collect();
        let cdf = cdf_table(joint.atoms().iter().map(|a| a.prob));
        Ok(Self {
            kind: CouplingKind::UserJoint,
            index,
            sampler: PairSampler::Table { cells, cdf },
            joint: Some(joint),
        })
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn index(&self) -> &IndexModel {
        &self.index
    }

    pub fn joint(&self) -> Option<&JointPmf> {
        self.joint.as_ref()
    }

    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        self.sampler.sample(rng)
    }

    pub fn statistics(&self, mode: StatisticsMode) -> Result<CouplingStatistics> {
        coupling_statistics(self, mode)
    }
}

/// Builds the coupling `kind` for `index`.
pub fn make_coupling(index: &IndexModel, kind: CouplingKind) -> Result<SizeBiasCoupling> {
    SizeBiasCoupling::new(index, kind)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatisticsMode {
    Exact,
    MonteCarlo {
        reps: u64,
        seed: u64,
    },
    /// Exact when the joint law is available, Monte Carlo otherwise.
    Auto {
        reps: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    MonteCarlo { reps: u64, seed: u64, std_errors: BTreeMap<String, f64> },
}

/// Functionals of D = N^s - N used by the bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingStatistics {
    pub e_d: f64,
    pub e_d2: f64,
    pub e_d2_neg: f64,
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
    pub provenance: Provenance,
}

impl CouplingStatistics {
    /// E[1{D>=0} D^2].
    pub fn e_d2_pos(&self) -> f64 {
        self.e_d2 - self.e_d2_neg
    }

    fn values(&self) -> [(&'static str, f64); 13] {
        [
            ("e_d", self.e_d),
            ("e_d2", self.e_d2),
            ("e_d2_neg", self.e_d2_neg),
            ("var_cond", self.var_cond),
            ("e_cond_d2_sq", self.e_cond_d2_sq),
            ("e_cond_d2_neg_sq", self.e_cond_d2_neg_sq),
            ("p_n0", self.p_n0),
            ("p_dneg", self.p_dneg),
            ("e_d_pos_ninvhalf", self.e_d_pos_ninvhalf),
            ("e_d2_pos_ninvhalf", self.e_d2_pos_ninvhalf),
            ("e_pos_ninvhalf", self.e_pos_ninvhalf),
            ("e_ninvhalf", self.e_ninvhalf),
            ("e_d2_neg_nsinvhalf", self.e_d2_neg_nsinvhalf),
        ]
    }

    /// Fails with `MissingStatistic` when any field is not finite.
    pub fn check_finite(&self) -> Result<()> {
        match self.values().into_iter().find(|(_, v)| !v.is_finite()) {
            Some((name, _)) => Err(Error::MissingStatistic(name)),
            None => Ok(()),
        }
    }
}

fn inv_sqrt(k: u64) -> f64 {
    if k == 0 {
        0.0
    } else {
        1.0 / (k as f64).sqrt()
    }
}

/// Plug-in statistics of a weighted joint law sorted by (n, n_s).
fn statistics_from_atoms(atoms: &[JointAtom], provenance: Provenance) -> CouplingStatistics {
    let mut s = CouplingStatistics {
        e_d: 0.0,
        e_d2: 0.0,
        e_d2_neg: 0.0,
        var_cond: 0.0,
        e_cond_d2_sq: 0.0,
        e_cond_d2_neg_sq: 0.0,
        p_n0: 0.0,
        p_dneg: 0.0,
        e_d_pos_ninvhalf: 0.0,
        e_d2_pos_ninvhalf: 0.0,
        e_pos_ninvhalf: 0.0,
        e_ninvhalf: 0.0,
        e_d2_neg_nsinvhalf: 0.0,
        provenance,
    };
    // per n: (mass, sum of D, sum of D^2 on D >= 0)
    let mut by_n: Vec<(f64, f64, f64)> = Vec::new();
    let mut by_ns: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    let mut current = None;
    for a in atoms {
        let (d, p) = (a.d() as f64, a.prob);
        let w = inv_sqrt(a.n);
        s.e_d += p * d;
        s.e_d2 += p * d * d;
        if a.n == 0 {
            s.p_n0 += p;
        }
        s.e_ninvhalf += p * w;
        let ns_cell = by_ns.entry(a.ns).or_insert((0.0, 0.0));
        ns_cell.0 += p;
        if d < 0.0 {
            s.e_d2_neg += p * d * d;
            s.p_dneg += p;
            s.e_d2_neg_nsinvhalf += p * d * d * inv_sqrt(a.ns);
            ns_cell.1 += p * d * d;
        } else {
            s.e_d_pos_ninvhalf += p * d * w;
            s.e_d2_pos_ninvhalf += p * d * d * w;
            s.e_pos_ninvhalf += p * w;
        }
        if current != Some(a.n) {
            current = Some(a.n);
            by_n.push((0.0, 0.0, 0.0));
        }
        let cell = by_n.last_mut().unwrap();
        cell.0 += p;
        cell.1 += p * d;
        if d >= 0.0 {
            cell.2 += p * d * d;
        }
    }
    for (pn, sd, sd2) in by_n {
        let m = sd / pn;
        s.var_cond += pn * (m - s.e_d).powi(2);
        s.e_cond_d2_sq += pn * (sd2 / pn).powi(2);
    }
    for (pns, sd2) in by_ns.values() {
        s.e_cond_d2_neg_sq += pns * (sd2 / pns).powi(2);
    }
    s
}

fn empirical_atoms(pairs: impl Iterator<Item = (u64, u64)>) -> Vec<JointAtom> {
    let mut cells: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    let mut total = 0u64;
    for p in pairs {
        *cells.entry(p).or_insert(0) += 1;
        total += 1;
    }
    cells.into_iter().map(|((n, ns), c)| JointAtom { n, ns, prob: c as f64 / total as f64 }).collect()
}

fn monte_carlo_statistics(coupling: &SizeBiasCoupling, reps: u64, seed: u64) -> Result<CouplingStatistics> {
    if reps < BATCHES * 2 {
        return Err(Error::InvalidParameter(format!("need at least {} replications", BATCHES * 2)));
    }
    let mut all = Vec::with_capacity(reps as usize);
    let mut batch_values: Vec<Vec<f64>> = Vec::new();
    for b in 0..BATCHES {
        let size = reps / BATCHES + u64::from(b < reps % BATCHES);
        let mut rng = RandomStream::for_purpose(seed, "coupling", b);
        let pairs: Vec<(u64, u64)> = (0..size).map(|_| coupling.sample_pair(&mut rng)).collect();
        let stats = statistics_from_atoms(&empirical_atoms(pairs.iter().copied()), Provenance::Exact);
        batch_values.push(stats.values().iter().map(|(_, v)| *v).collect());
        all.extend(pairs);
    }
    let mut stats = statistics_from_atoms(&empirical_atoms(all.into_iter()), Provenance::Exact);
    let names = stats.values().map(|(n, _)| n);
    let mut std_errors = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        let xs: Vec<f64> = batch_values.iter().map(|v| v[i]).collect();
        let m = xs.iter().sum::<f64>() / BATCHES as f64;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
        std_errors.insert(name.to_string(), (var / BATCHES as f64).sqrt());
    }
    stats.provenance = Provenance::MonteCarlo { reps, seed, std_errors };
    Ok(stats)
}

/// Statistics of D by joint enumeration or by simulation.
pub fn coupling_statistics(coupling: &SizeBiasCoupling, mode: StatisticsMode) -> Result<CouplingStatistics> {
    match (mode, coupling.joint()) {
        (StatisticsMode::Exact, None) => Err(Error::ExactUnavailable(format!(
            "joint support of {} coupling for {} could not be enumerated",
            coupling.kind(),
            coupling.index()
        ))),
        (StatisticsMode::Exact, Some(j)) | (StatisticsMode::Auto { .. }, Some(j)) => {
            Ok(statistics_from_atoms(j.atoms(), Provenance::Exact))
        }
        (StatisticsMode::MonteCarlo { reps, seed }, _) | (StatisticsMode::Auto { reps, seed }, None) => {
            monte_carlo_statistics(coupling, reps, seed)
        }
    }
}
