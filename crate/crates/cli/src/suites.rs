//! Property suites behind `randsum verify`.

use crate::args::Suite;
use rand::Rng;
use randsum::biasing::{make_coupling, size_bias_distance_identities, size_bias_pmf, CouplingKind};
use randsum::metrics::{empirical_distance_to_normal, exact_kolmogorov, exact_total_variation, exact_wasserstein};
use randsum::models::{parse_index, parse_summand, IndexModel, SummandModel, DEFAULT_TAIL_TOL};
use randsum::montecarlo::{
    coupling_marginal_check, verify_bias_identity, IdentityKind, IdentityMode, IdentityResidual, TestFunction,
};
use randsum::pmf::DiscretePmf;
use randsum::rng::RandomStream;
use randsum::special::{norm_cdf, norm_quantile};
use randsum::stein::{
    fz_derivative, fz_difference_check, fz_value, taylor_remainder_bounds_check, SteinSolution, FZ_SUP,
};
use randsum::Result;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub suite: &'static str,
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

struct Recorder {
    suite: &'static str,
    out: Vec<Outcome>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Self { suite, out: Vec::new() }
    }

    fn push(&mut self, check: impl Into<String>, pass: bool, detail: String) {
        self.out.push(Outcome { suite: self.suite, check: check.into(), pass, detail });
    }

    /// Records `Err` as a failed check instead of aborting the suite.
    fn attempt(&mut self, check: &str, f: impl FnOnce() -> Result<(bool, String)>) {
        match f() {
            Ok((pass, detail)) => self.push(check, pass, detail),
            Err(e) => self.push(check, false, format!("error: {e}")),
        }
    }
}

pub fn run(suite: Suite, reps: u64, seed: u64) -> Vec<Outcome> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Stein | Suite::All) {
        out.extend(stein(seed));
    }
    if matches!(suite, Suite::Bias | Suite::All) {
        out.extend(bias(reps, seed));
    }
    if matches!(suite, Suite::Metric | Suite::All) {
        out.extend(metric());
    }
    out
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

const ZS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn stein(seed: u64) -> Vec<Outcome> {
    let mut r = Recorder::new("stein");

    let (mut worst_ode, mut sup_f, mut sup_df) = (0.0f64, 0.0f64, 0.0f64);
    for z in ZS {
        for x in linspace(-8.0, 8.0, 10_000) {
            let (f, df) = (fz_value(z, x), fz_derivative(z, x));
            sup_f = sup_f.max(f);
            sup_df = sup_df.max(df.abs());
            if x != z {
                let rhs = f64::from(x <= z) - norm_cdf(z);
                worst_ode = worst_ode.max((df - x * f - rhs).abs());
            }
        }
    }
    r.push("ode-residual", worst_ode <= 1e-9, format!("max {worst_ode:.3e} over 5 x 10^4 points"));
    r.push("sup-fz", sup_f <= FZ_SUP + 1e-12, format!("max {sup_f:.15} vs {FZ_SUP:.15}"));
    r.push("sup-fz-derivative", sup_df <= 1.0 + 1e-9, format!("max {sup_df:.15}"));
    let f00 = fz_value(0.0, 0.0);
    r.push("fz-at-origin", (f00 - FZ_SUP).abs() <= 1e-12, format!("{f00:.15}"));

    let mut stream = RandomStream::for_purpose(seed, "verify-stein", 0);
    let triples: Vec<(f64, f64, f64)> = (0..1000)
        .map(|_| (stream.random_range(-6.0..6.0), stream.random_range(-2.0..2.0), stream.random_range(-3.0..3.0)))
        .collect();
    r.attempt("taylor-remainder", || {
        let h = SteinSolution::lipschitz(f64::abs, &[0.0])?;
        let rep = taylor_remainder_bounds_check(&triples, &h)?;
        Ok((rep.passed(), format!("{} checks, min slack {:.3e}", rep.checked, rep.min_slack)))
    });
    let quads: Vec<(f64, f64, f64, f64)> = (0..1000)
        .map(|_| {
            (
                stream.random_range(-6.0..6.0),
                stream.random_range(-2.0..2.0),
                stream.random_range(-2.0..2.0),
                stream.random_range(-3.0..3.0),
            )
        })
        .collect();
    let rep = fz_difference_check(&quads);
    r.push("fz-difference", rep.passed(), format!("{} checks, min slack {:.3e}", rep.checked, rep.min_slack));

    r.attempt("fh-forms-agree", || {
        let h = SteinSolution::lipschitz(|x: f64| x.sin(), &[])?;
        let mut worst = 0.0f64;
        for x in linspace(-3.0, 3.0, 13) {
            worst = worst.max((h.value_lower_form(x)? - h.value_upper_form(x)?).abs());
        }
        Ok((worst <= 1e-9, format!("max gap {worst:.3e}")))
    });
    r.out
}

fn residual_line(res: &IdentityResidual) -> String {
    format!("lhs {:.10} rhs {:.10} residual {:.3e} se {:.3e}", res.lhs, res.rhs, res.residual, res.std_error)
}

fn bias(reps: u64, seed: u64) -> Vec<Outcome> {
    let mut r = Recorder::new("bias");
    let indices = ["poisson:lambda=3", "binomial:n=20,p=0.3", "hyper:n=5,r=10,s=10", "negbin:r=3,q=0.4"];
    let unit = SummandModel::bernoulli(1.0).expect("valid summand");
    for spec in indices {
        for f in [TestFunction::Linear, TestFunction::Square, TestFunction::Cube] {
            r.attempt(&format!("size/{spec}/{f}"), || {
                let res = verify_bias_identity(IdentityKind::Size, &parse_index(spec)?, &unit, f, IdentityMode::Exact)?;
                Ok((res.pass, residual_line(&res)))
            });
        }
    }

    let dummy = IndexModel::dirac(1).expect("valid index");
    r.attempt("zero/bernoulli:p=0.3/x2", || {
        let res = verify_bias_identity(
            IdentityKind::Zero,
            &dummy,
            &SummandModel::bernoulli(0.3)?,
            TestFunction::Square,
            IdentityMode::Exact,
        )?;
        let pass = res.pass && (res.lhs - 0.084).abs() <= 1e-12 && (res.rhs - 0.084).abs() <= 1e-12;
        Ok((pass, residual_line(&res)))
    });
    for f in [TestFunction::Square, TestFunction::Cube] {
        r.attempt(&format!("zero/three-point/{f}"), || {
            let pmf = DiscretePmf::new(vec![-1.0, 0.5, 2.0], vec![0.3, 0.5, 0.2], 0.0)?;
            let res =
                verify_bias_identity(IdentityKind::Zero, &dummy, &SummandModel::finite(pmf)?, f, IdentityMode::Exact)?;
            Ok((res.pass, residual_line(&res)))
        });
    }
    r.attempt("zero/exp:rate=1/sin", || {
        let mode = IdentityMode::MonteCarlo { reps, seed };
        let res =
            verify_bias_identity(IdentityKind::Zero, &dummy, &parse_summand("exp:rate=1")?, TestFunction::Sin, mode)?;
        Ok((res.pass, residual_line(&res)))
    });

    let couplings = [
        (CouplingKind::PoissonShift, "poisson:lambda=5"),
        (CouplingKind::BinomialDropOne, "binomial:n=20,p=0.3"),
        (CouplingKind::HypergeometricMarkedBall, "hyper:n=5,r=10,s=10"),
        (CouplingKind::Quantile, "poisson:lambda=5"),
        (CouplingKind::DiracIdentity, "dirac:n=7"),
        (CouplingKind::InfdivIncrement, "negbin:r=3,q=0.4"),
        (CouplingKind::ConvolutionSingleIndex, "conv:copies=3,base=binomial:n=4,p=0.5"),
    ];
    for (kind, spec) in couplings {
        r.attempt(&format!("marginals/{kind}/{spec}"), || {
            let c = make_coupling(&parse_index(spec)?, kind)?;
            let m = coupling_marginal_check(&c, reps, seed)?;
            let detail = format!(
                "tv_n {:.3e} (noise {:.3e}) tv_ns {:.3e} (noise {:.3e})",
                m.tv_n, m.mc_error_n, m.tv_ns, m.mc_error_ns
            );
            Ok((m.pass, detail))
        });
    }

    for f in [TestFunction::Sin, TestFunction::Square] {
        r.attempt(&format!("wstar/poisson:lambda=50/{f}"), || {
            let res = verify_bias_identity(
                IdentityKind::Wstar,
                &parse_index("poisson:lambda=50")?,
                &parse_summand("twopoint:x0=-1,x1=1,p=0.5")?,
                f,
                IdentityMode::MonteCarlo { reps, seed },
            )?;
            Ok((res.pass, residual_line(&res)))
        });
    }
    r.out
}

fn metric() -> Vec<Outcome> {
    let mut r = Recorder::new("metric");
    for spec in ["poisson:lambda=2", "binomial:n=20,p=0.3", "hyper:n=5,r=10,s=10"] {
        r.attempt(&format!("size-bias-distances/{spec}"), || {
            let index = parse_index(spec)?;
            let p = index.materialize_pmf(DEFAULT_TAIL_TOL)?;
            let q = size_bias_pmf(&p)?;
            let ids = size_bias_distance_identities(&index)?;
            let (k, tv, w) = (exact_kolmogorov(&p, &q), exact_total_variation(&p, &q), exact_wasserstein(&p, &q));
            let worst = (k - ids.d_k).abs().max((tv - ids.d_tv).abs()).max((w - ids.d_w).abs());
            Ok((worst <= 1e-10, format!("d_K {k:.12} d_TV {tv:.12} d_W {w:.12} gap {worst:.3e}")))
        });
    }
    r.attempt("unit-shift", || {
        let p = IndexModel::poisson(4.0)?.materialize_pmf(DEFAULT_TAIL_TOL)?;
        let w = exact_wasserstein(&p, &p.shifted(1.0));
        let k = exact_kolmogorov(&p, &p.shifted(1.0));
        let tv = exact_total_variation(&p, &p.shifted(1.0));
        Ok(((w - 1.0).abs() <= 1e-10 && k <= tv + 1e-15, format!("d_W {w:.12} d_K {k:.6} d_TV {tv:.6}")))
    });
    r.attempt("normal-quantile-sample", || {
        let n = 10_000;
        let sample: Vec<f64> = (0..n).map(|i| norm_quantile((i as f64 + 0.5) / n as f64)).collect();
        let d = empirical_distance_to_normal(&sample)?;
        let pass = (d.d_k.value - 0.5 / n as f64).abs() <= 1e-9 && d.d_w.value <= 1e-3;
        Ok((pass, format!("d_K {:.3e} d_W {:.3e}", d.d_k.value, d.d_w.value)))
    });
    r.out
}
