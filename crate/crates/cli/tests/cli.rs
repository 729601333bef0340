use serde_json::Value;
use std::process::{Command, Output};

fn randsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randsum")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn cor6_terms_sum_to_total() {
    let out = randsum(&["bound", "--index", "poisson:lambda=100", "--summand", "exp:rate=1", "--theorem", "cor6"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&out);
    let reports = reports.as_array().expect("two metrics give an array");
    assert_eq!(reports.len(), 2);
    for r in reports {
        let total = r["total"].as_f64().unwrap();
        let sum: f64 = r["terms"].as_array().unwrap().iter().map(|t| t["value"].as_f64().unwrap()).sum();
        assert!((sum - total).abs() <= 1e-14 * total, "{sum} vs {total}");
    }
}

#[test]
fn cor4_wasserstein_on_rademacher() {
    let out = randsum(&[
        "bound",
        "--index",
        "dirac:n=100",
        "--summand",
        "twopoint:x0=-1,x1=1,p=0.5",
        "--theorem",
        "cor4",
        "--metric",
        "wasserstein",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["theorem"], "cor4");
    assert!((r["total"].as_f64().unwrap() - 0.3).abs() < 1e-15);
}

#[test]
fn config_is_echoed_with_default_seed() {
    let out = randsum(&["bound", "--index", "poisson:lambda=10", "--summand", "exp:rate=1", "--theorem", "cor6"]);
    let err = String::from_utf8(out.stderr).unwrap();
    let line = err.lines().find(|l| l.starts_with("config ")).expect("config line");
    let cfg: Value = serde_json::from_str(&line["config ".len()..]).unwrap();
    assert_eq!(cfg["seed"], 20_160_601);
    assert_eq!(cfg["command"], "bound");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(randsum(&["bound", "--index", "poisson:lambda=10"]).status.code(), Some(2));
    assert_eq!(
        randsum(&["bound", "--index", "poisson:lambda=10", "--summand", "exp:rate=1", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(randsum(&["bound", "--index", "poisson:mu=10", "--summand", "exp:rate=1"]).status.code(), Some(2));
    assert_eq!(
        randsum(&["bound", "--index", "poisson:lambda=10", "--summand", "exp:rate=1", "--theorem", "cor9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(randsum(&["sweep", "--index", "poisson:lambda={1,2", "--summand", "exp:rate=1"]).status.code(), Some(2));
}

#[test]
fn table_and_csv_formats() {
    let base = ["bound", "--index", "poisson:lambda=100", "--summand", "exp:rate=1", "--theorem", "cor6"];
    let table = randsum(&[&base[..], &["--format", "table"]].concat());
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("cor6 wasserstein  total 0.426813"), "{text}");

    let csv = randsum(&[&base[..], &["--format", "csv", "--metric", "wasserstein"]].concat());
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theorem,metric,label,value"));
    assert_eq!(text.lines().filter(|l| l.contains(",total,")).count(), 1);
}

#[test]
fn verify_stein_exits_zero() {
    let out = randsum(&["verify", "--suite", "stein"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS stein/ode-residual")));
    assert!(!text.contains("FAIL"));
}

#[test]
fn simulate_reports_verdicts() {
    let out = randsum(&[
        "simulate",
        "--index",
        "poisson:lambda=50",
        "--summand",
        "exp:rate=1",
        "--reps",
        "20000",
        "--theorem",
        "cor6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let verdicts = r["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 2);
    assert!(verdicts.iter().all(|v| v["verdict"] == "dominates"));
    assert_eq!(r["seed"], 20_160_601);
}

#[test]
fn sweep_is_byte_identical_across_jobs() {
    let args = |jobs: &'static str| {
        vec![
            "sweep",
            "--index",
            "poisson:lambda={25,100}",
            "--index",
            "binomial:n=100,p=0.3",
            "--summand",
            "exp:rate=1",
            "--reps",
            "30000",
            "--chunk-size",
            "4096",
            "--jobs",
            jobs,
        ]
    };
    let one = randsum(&args("1"));
    let again = randsum(&args("1"));
    let eight = randsum(&args("8"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, eight.stdout);

    let text = String::from_utf8(one.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("index_params,summand,reps,seed,d_k_emp,d_k_band,d_w_emp,bound_id,bound_total,verdict")
    );
    let order: Vec<&str> = lines.map(|l| l.split(',').next().unwrap().trim_matches('"')).collect();
    let first_binomial = order.iter().position(|s| s.starts_with("binomial")).unwrap();
    assert!(order[..first_binomial].iter().all(|s| s.starts_with("poisson")));
    assert!(
        order.iter().position(|s| *s == "poisson:lambda=100").unwrap()
            > order.iter().position(|s| *s == "poisson:lambda=25").unwrap()
    );
}
