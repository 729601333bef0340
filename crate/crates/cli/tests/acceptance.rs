//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines always print.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use randsum::biasing::{make_coupling, CouplingKind, CouplingStatistics, Provenance};
use randsum::bounds::{
    bound_corollary, bound_wasserstein_thm3a, evaluate, hyper_eps, BoundConstants, Metric, TheoremId,
};
use randsum::metrics::{empirical_distance_to_normal, exact_kolmogorov, exact_total_variation, exact_wasserstein};
use randsum::models::{parse_index, parse_summand, IndexModel, ModelMoments, SummandModel};
use randsum::montecarlo::{
    concentration_check, coupling_marginal_check, run_experiment, sample_w, verify_bias_identity, ExperimentConfig,
    IdentityKind, IdentityMode, TestFunction, Verdict,
};
use randsum::pmf::DiscretePmf;
use randsum::rng::{RandomStream, DEFAULT_SEED};
use randsum::special::norm_cdf;
use randsum::stein::{fz_derivative, fz_value, taylor_remainder_bounds_check, SteinSolution, FZ_SUP};
use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, format!("{what} took {t:?}, limit {limit:?}"))
}

/// Exact distances between N and N^s agree with E|N - alpha| / (2 alpha) and gamma^2 / alpha.
fn size_bias_distances() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for spec in ["poisson:lambda=2", "binomial:n=20,p=0.3", "hyper:n=5,r=10,s=10"] {
        let index = parse_index(spec).map_err(err)?;
        let p = index.materialize_pmf(1e-12).map_err(err)?;
        let alpha: f64 = p.iter().map(|(k, pk)| k * pk).sum();
        let var: f64 = p.iter().map(|(k, pk)| (k - alpha).powi(2) * pk).sum();
        let mad: f64 = p.iter().map(|(k, pk)| (k - alpha).abs() * pk).sum();
        let q = DiscretePmf::from_weights(p.iter().filter(|(k, _)| *k > 0.0).map(|(k, pk)| (k, k * pk / alpha)), 0.0)
            .map_err(err)?;
        let (dk, dtv, dw) = (exact_kolmogorov(&p, &q), exact_total_variation(&p, &q), exact_wasserstein(&p, &q));
        for (got, want) in [(dk, mad / (2.0 * alpha)), (dtv, mad / (2.0 * alpha)), (dw, var / alpha)] {
            let gap = (got - want).abs();
            worst = worst.max(gap);
            ensure(gap <= 1e-10, format!("{spec}: {got} vs {want}"))?;
        }
    }
    within_time(start, Duration::from_secs(1), "size-bias distances")?;
    Ok(format!("3 laws, max gap {worst:.2e}, {:?}", start.elapsed()))
}

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, j| acc * BigInt::from(n - j) / BigInt::from(j + 1))
}

/// Var((1 - N/r)(1 - N/n)) by enumeration of the hypergeometric pmf.
fn brute_eps(n: u64, r: u64, s: u64) -> BigRational {
    let total = binom(r + s, n);
    let g = |k: u64| {
        (BigRational::one() - BigRational::new(k.into(), r.into()))
            * (BigRational::one() - BigRational::new(k.into(), n.into()))
    };
    let atoms: Vec<(BigRational, BigRational)> =
        (0..=n.min(r)).map(|k| (BigRational::new(binom(r, k) * binom(s, n - k), total.clone()), g(k))).collect();
    let mean: BigRational = atoms.iter().map(|(p, v)| p * v).sum();
    atoms.iter().map(|(p, v)| p * (v - &mean) * (v - &mean)).sum()
}

fn eps_oracle() -> Outcome {
    let start = Instant::now();
    ensure(hyper_eps(2, 2, 2).map_err(err)? == BigRational::new(7.into(), 72.into()), "eps(2,2,2) is not 7/72".into())?;
    let mut count = 0;
    for total in 4..=40u64 {
        for r in 1..total {
            let s = total - r;
            for n in 1..=r.min(s) {
                let got = hyper_eps(n, r, s).map_err(err)?;
                ensure(got == brute_eps(n, r, s), format!("mismatch at n={n} r={r} s={s}"))?;
                count += 1;
            }
        }
    }
    within_time(start, Duration::from_secs(30), "eps oracle")?;
    Ok(format!("{count} triples exact, eps(2,2,2) = 7/72, {:?}", start.elapsed()))
}

fn stats_constant_d(d: f64, p_n0: f64, e_ninvhalf: f64) -> CouplingStatistics {
    CouplingStatistics {
        e_d: d,
        e_d2: d * d,
        e_d2_neg: 0.0,
        var_cond: 0.0,
        e_cond_d2_sq: d.powi(4),
        e_cond_d2_neg_sq: 0.0,
        p_n0,
        p_dneg: 0.0,
        e_d_pos_ninvhalf: d * e_ninvhalf,
        e_d2_pos_ninvhalf: d * d * e_ninvhalf,
        e_pos_ninvhalf: e_ninvhalf,
        e_ninvhalf,
        e_d2_neg_nsinvhalf: 0.0,
        provenance: Provenance::Exact,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn specialization_equalities() -> Outcome {
    let c = BoundConstants::default();
    let summands = ["exp:rate=1", "bernoulli:p=0.3", "twopoint:x0=-1,x1=2,p=0.4"];
    let mut worst = 0.0f64;
    for lambda in [5.0, 50.0, 500.0] {
        for spec in summands {
            let index = IndexModel::poisson(lambda).map_err(err)?;
            let x = parse_summand(spec).map_err(err)?;
            let m = ModelMoments::new(&index, &x).map_err(err)?;
            let f = index.functionals().map_err(err)?;
            let thm = bound_wasserstein_thm3a(&m, &stats_constant_d(1.0, f.p_n0, f.e_ninvhalf)).map_err(err)?;
            let cor = bound_corollary(TheoremId::Cor6, &index, &x, &c).map_err(err)?;
            let cor = cor.wasserstein.ok_or("cor6 has no wasserstein bound")?;
            worst = worst.max(rel(cor.total, thm.total));
            ensure(
                rel(cor.total, thm.total) <= 1e-12,
                format!("cor6 lambda={lambda} {spec}: {} vs {}", cor.total, thm.total),
            )?;
        }
    }
    for n in [10u64, 100, 1000] {
        for spec in summands {
            let index = IndexModel::dirac(n).map_err(err)?;
            let x = parse_summand(spec).map_err(err)?;
            let m = ModelMoments::new(&index, &x).map_err(err)?;
            let thm = bound_wasserstein_thm3a(&m, &stats_constant_d(0.0, 0.0, 1.0 / (n as f64).sqrt())).map_err(err)?;
            let cor = bound_corollary(TheoremId::Cor4, &index, &x, &c).map_err(err)?;
            let cor = cor.wasserstein.ok_or("cor4 has no wasserstein bound")?;
            worst = worst.max(rel(cor.total, thm.total));
            ensure(rel(cor.total, thm.total) <= 1e-12, format!("cor4 n={n} {spec}: {} vs {}", cor.total, thm.total))?;
        }
    }
    let index = IndexModel::poisson(40.0).map_err(err)?;
    let x = SummandModel::exponential(1.0).map_err(err)?;
    let r = evaluate(TheoremId::Cor3, Metric::Wasserstein, &index, &x, None, &c).map_err(err)?;
    let ed2 = r.extras.iter().find(|e| e.label == "E[D²]").ok_or("cor3 reports no E[D²]")?.value;
    ensure((ed2 - 1.0).abs() <= 1e-12, format!("cor3 E[D²] = {ed2}"))?;
    Ok(format!("18 grid points, max relative gap {worst:.2e}; cor3 E[D²] = {ed2}"))
}

fn stein_suite() -> Outcome {
    let start = Instant::now();
    let (mut ode, mut sup_f, mut sup_df) = (0.0f64, 0.0f64, 0.0f64);
    for z in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        for i in 0..10_000 {
            let x = -8.0 + 16.0 * i as f64 / 9_999.0;
            let (f, df) = (fz_value(z, x), fz_derivative(z, x));
            sup_f = sup_f.max(f);
            sup_df = sup_df.max(df.abs());
            if x != z {
                ode = ode.max((df - x * f - (f64::from(x <= z) - norm_cdf(z))).abs());
            }
        }
    }
    ensure(ode <= 1e-9, format!("ODE residual {ode:e}"))?;
    let sup_bound = (2.0 * PI).sqrt() / 4.0;
    ensure(sup_f <= sup_bound + 1e-12, format!("sup f_z {sup_f}"))?;
    ensure(sup_df <= 1.0 + 1e-9, format!("sup |f_z'| {sup_df}"))?;
    let f00 = fz_value(0.0, 0.0);
    ensure((f00 - sup_bound).abs() <= 1e-12 && (FZ_SUP - sup_bound).abs() <= 1e-15, format!("f_0(0) = {f00}"))?;

    let mut rng = RandomStream::for_purpose(DEFAULT_SEED, "acceptance-taylor", 0);
    let triples: Vec<(f64, f64, f64)> = (0..1000)
        .map(|_| (rng.random_range(-6.0..6.0), rng.random_range(-2.0..2.0), rng.random_range(-3.0..3.0)))
        .collect();
    let h = SteinSolution::lipschitz(f64::abs, &[0.0]).map_err(err)?;
    let rep = taylor_remainder_bounds_check(&triples, &h).map_err(err)?;
    ensure(rep.passed(), format!("{} Taylor violations, min slack {:e}", rep.violations, rep.min_slack))?;
    within_time(start, Duration::from_secs(5), "stein suite")?;
    Ok(format!(
        "ODE residual {ode:.1e}, sup f_z {sup_f:.12}, sup |f_z'| {sup_df:.6}, {} Taylor checks, {:?}",
        rep.checked,
        start.elapsed()
    ))
}

fn zero_bias_identity() -> Outcome {
    let dummy = IndexModel::dirac(1).map_err(err)?;
    let bern = SummandModel::bernoulli(0.3).map_err(err)?;
    let r = verify_bias_identity(IdentityKind::Zero, &dummy, &bern, TestFunction::Square, IdentityMode::Exact)
        .map_err(err)?;
    // E[Y^3] for Y = X - 0.3 is p(1-p)(1-2p)
    let want = 0.3 * 0.7 * (1.0 - 0.6);
    ensure((r.lhs - want).abs() <= 1e-12 && (r.rhs - want).abs() <= 1e-12, format!("lhs {} rhs {}", r.lhs, r.rhs))?;

    let pmf = DiscretePmf::new(vec![-2.0, 1.0, 3.0], vec![0.4, 0.4, 0.2], 0.0).map_err(err)?;
    let three = SummandModel::finite(pmf).map_err(err)?;
    let mut worst = 0.0f64;
    for f in [TestFunction::Square, TestFunction::Cube] {
        let r = verify_bias_identity(IdentityKind::Zero, &dummy, &three, f, IdentityMode::Exact).map_err(err)?;
        worst = worst.max(r.residual);
        ensure(r.residual <= 1e-10, format!("three-point {f}: residual {:e}", r.residual))?;
    }
    Ok(format!("Bernoulli(0.3) x^2: both sides {want}; three-point max residual {worst:.1e}"))
}

fn domination() -> Outcome {
    let start = Instant::now();
    let rademacher = "twopoint:x0=-1,x1=1,p=0.5";
    let mut cases: Vec<(String, &str, TheoremId)> = Vec::new();
    for lambda in [25, 100, 400] {
        cases.push((format!("poisson:lambda={lambda}"), "exp:rate=1", TheoremId::Cor6));
    }
    cases.push(("binomial:n=100,p=0.3".into(), "bernoulli:p=0.3", TheoremId::Cor7));
    cases.push(("hyper:n=20,r=100,s=300".into(), rademacher, TheoremId::Cor8));
    cases.push(("dirac:n=10000".into(), rademacher, TheoremId::Cor4));
    for idx in ["poisson:lambda=100", "binomial:n=100,p=0.3", "dirac:n=10000"] {
        cases.push((idx.into(), rademacher, TheoremId::Thm5));
    }
    let mut lines = Vec::new();
    for (index, summand, theorem) in cases {
        let mut cfg = ExperimentConfig::new(index.clone(), summand);
        cfg.reps = 1_000_000;
        cfg.theorems = vec![theorem];
        let report = run_experiment(&cfg).map_err(err)?;
        ensure(!report.verdicts.is_empty(), format!("{index}/{summand}: no bound evaluated"))?;
        for v in &report.verdicts {
            ensure(
                v.verdict != Verdict::Violated && v.empirical - v.band <= v.bound,
                format!(
                    "{index} {summand} {} {}: empirical {} band {} bound {}",
                    v.theorem, v.metric, v.empirical, v.band, v.bound
                ),
            )?;
            lines.push(format!("{index} {} {}/{} {:.4}", v.verdict.name(), v.theorem, v.metric, v.empirical / v.bound));
        }
    }
    within_time(start, Duration::from_secs(600), "domination")?;
    Ok(format!("{} bounds dominate (empirical/bound: {}), {:?}", lines.len(), lines.join("; "), start.elapsed()))
}

fn rate_recovery() -> Outcome {
    let x = SummandModel::exponential(1.0).map_err(err)?;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for lambda in [25.0, 100.0, 400.0, 1600.0] {
        let index = IndexModel::poisson(lambda).map_err(err)?;
        let sample = sample_w(&index, &x, 1_000_000, DEFAULT_SEED, 1 << 16, 0).map_err(err)?;
        let d = empirical_distance_to_normal(&sample).map_err(err)?;
        lx.push(f64::ln(lambda));
        ly.push(d.d_k.value.ln());
    }
    let mx = lx.iter().sum::<f64>() / 4.0;
    let my = ly.iter().sum::<f64>() / 4.0;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    ensure((slope + 0.5).abs() <= 0.1, format!("slope {slope}"))?;
    Ok(format!("slope {slope:.4}"))
}

fn coupling_laws() -> Outcome {
    let couplings = [
        (CouplingKind::PoissonShift, "poisson:lambda=5"),
        (CouplingKind::BinomialDropOne, "binomial:n=20,p=0.3"),
        (CouplingKind::HypergeometricMarkedBall, "hyper:n=5,r=10,s=10"),
        (CouplingKind::Quantile, "poisson:lambda=5"),
        (CouplingKind::DiracIdentity, "dirac:n=7"),
        (CouplingKind::InfdivIncrement, "negbin:r=3,q=0.4"),
        (CouplingKind::ConvolutionSingleIndex, "conv:copies=3,base=binomial:n=4,p=0.5"),
    ];
    let mut worst = 0.0f64;
    for (kind, spec) in couplings {
        let c = make_coupling(&parse_index(spec).map_err(err)?, kind).map_err(err)?;
        let m = coupling_marginal_check(&c, 1_000_000, DEFAULT_SEED).map_err(err)?;
        ensure(
            m.tv_n <= 3.0 * m.mc_error_n && m.tv_ns <= 3.0 * m.mc_error_ns,
            format!("{kind}: tv_n {} ({}) tv_ns {} ({})", m.tv_n, m.mc_error_n, m.tv_ns, m.mc_error_ns),
        )?;
        if m.mc_error_ns > 0.0 {
            worst = worst.max(m.tv_ns / m.mc_error_ns).max(m.tv_n / m.mc_error_n);
        }
    }
    let index = parse_index("poisson:lambda=50").map_err(err)?;
    let x = parse_summand("twopoint:x0=-1,x1=1,p=0.5").map_err(err)?;
    let mut z = Vec::new();
    for f in [TestFunction::Sin, TestFunction::Square] {
        let mode = IdentityMode::MonteCarlo { reps: 1_000_000, seed: DEFAULT_SEED };
        let r = verify_bias_identity(IdentityKind::Wstar, &index, &x, f, mode).map_err(err)?;
        ensure(r.residual <= 4.0 * r.std_error, format!("wstar {f}: residual {} se {}", r.residual, r.std_error))?;
        z.push(format!("{f} {:.2} SE", r.residual / r.std_error));
    }
    Ok(format!("7 couplings, worst TV/noise {worst:.2}; wstar {}", z.join(", ")))
}

fn concentration() -> Outcome {
    let x = SummandModel::exponential(1.0).map_err(err)?;
    let c = BoundConstants::default();
    let mut lines = Vec::new();
    for n in [10u64, 100, 1000] {
        for (t, u) in [(-0.5, 0.5), (0.0, 0.1), (-2.0, -1.0)] {
            let index = IndexModel::dirac(n).map_err(err)?;
            let r = concentration_check(&index, n, &x, t, u, 200_000, DEFAULT_SEED, &c).map_err(err)?;
            // Exp(1): c = 1, d^3 = E|X - 1|^3 = 12/e - 2, sigma = sqrt(n)
            let d3 = 12.0 / std::f64::consts::E - 2.0;
            let nf = n as f64;
            let want = nf.sqrt() * (u - t) / (2.0 * PI * nf).sqrt() + d3 / nf.sqrt();
            ensure(rel(r.bound, want) <= 1e-12, format!("n={n}: bound {} vs {want}", r.bound))?;
            ensure(
                r.empirical - 4.0 * r.std_error <= r.bound,
                format!("n={n} ({t},{u}): {} > {}", r.empirical, r.bound),
            )?;
            lines.push(format!("{:.3}/{:.3}", r.empirical, r.bound));
        }
    }
    Ok(format!("9 windows pass (empirical/bound: {})", lines.join(" ")))
}

fn sweep_determinism() -> Outcome {
    let run = |jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_randsum"))
            .args([
                "sweep",
                "--index",
                "poisson:lambda={25,100}",
                "--index",
                "dirac:n=100",
                "--summand",
                "exp:rate=1",
                "--summand",
                "twopoint:x0=-1,x1=1,p=0.5",
                "--reps",
                "50000",
                "--chunk-size",
                "8192",
                "--jobs",
                jobs,
            ])
            .output()
            .map_err(err)
    };
    let a = run("1")?;
    let b = run("1")?;
    let c = run("8")?;
    ensure(a.status.success(), format!("sweep exited {:?}", a.status.code()))?;
    ensure(a.stdout == b.stdout, "two runs with --jobs 1 differ".into())?;
    ensure(a.stdout == c.stdout, "--jobs 1 and --jobs 8 differ".into())?;
    let rows = a.stdout.iter().filter(|b| **b == b'\n').count() - 1;
    Ok(format!("{rows} rows byte-identical across runs and --jobs 1/8"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("size-bias distance identities", size_bias_distances),
        ("hypergeometric eps oracle", eps_oracle),
        ("specialization equalities", specialization_equalities),
        ("stein suite", stein_suite),
        ("zero-bias identity", zero_bias_identity),
        ("bound domination", domination),
        ("rate recovery", rate_recovery),
        ("coupling laws and W*", coupling_laws),
        ("concentration", concentration),
        ("sweep determinism", sweep_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
