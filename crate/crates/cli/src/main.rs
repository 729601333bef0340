mod args;
mod error;
mod expand;
mod output;
mod suites;

use args::{BoundArgs, Cli, Command, Format, RunArgs, SimulateArgs, SweepArgs, VerifyArgs};
use clap::Parser;
use error::CliError;
use randsum::biasing::StatisticsMode;
use randsum::bounds::{evaluate, Metric, TheoremId};
use randsum::models::{parse_index, parse_summand, ModelMoments};
use randsum::montecarlo::{
    default_theorems, needs_statistics, resolve_coupling, run_experiment, sweep_rows, ExperimentConfig,
};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(a) => bound(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Serialize)]
struct Echo<'a, T: Serialize> {
    command: &'a str,
    #[serde(flatten)]
    args: &'a T,
}

fn echo_config<T: Serialize>(command: &str, args: &T) -> Result<(), CliError> {
    eprintln!("config {}", serde_json::to_string(&Echo { command, args })?);
    Ok(())
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn bound(a: &BoundArgs) -> Result<ExitCode, CliError> {
    echo_config("bound", a)?;
    let index = parse_index(&a.index)?;
    let summand = parse_summand(&a.summand)?;
    let constants = a.constants.resolve()?;
    let m = ModelMoments::new(&index, &summand)?;
    let metrics = a.selection.metric.metrics();
    let explicit = !a.selection.theorem.is_empty();

    let wants_stats = !explicit || a.selection.theorem.iter().any(|t| needs_statistics(*t));
    let stats = if wants_stats {
        let coupling = resolve_coupling(&index, a.coupling.coupling, a.coupling.joint_pmf.as_deref())?;
        Some(coupling.statistics(StatisticsMode::Auto { reps: a.reps, seed: a.seed })?)
    } else {
        None
    };
    let theorems = if explicit {
        a.selection.theorem.clone()
    } else {
        default_theorems(&index, &m, stats.as_ref().map_or(0.0, |s| s.p_dneg))
    };

    let pairs: Vec<(TheoremId, Metric)> =
        theorems.iter().flat_map(|t| metrics.iter().filter(|m| t.supports(**m)).map(|m| (*t, *m))).collect();
    if pairs.is_empty() {
        return Err(CliError::Usage(format!("no selected bound is stated for {:?}", a.selection.metric)));
    }
    let mut reports = Vec::new();
    for (t, metric) in pairs {
        match evaluate(t, metric, &index, &summand, stats.as_ref(), &constants) {
            Ok(r) => reports.push(r),
            Err(e) if !explicit => eprintln!("skipped {t} {metric}: {e}"),
            Err(e) => return Err(e.into()),
        }
    }

    let mut w = writer(a.out.as_deref())?;
    match a.format {
        Format::Json if reports.len() == 1 => write_json(&mut w, &reports[0])?,
        Format::Json => write_json(&mut w, &reports)?,
        Format::Csv => output::bounds_csv(&mut w, &reports)?,
        Format::Table => output::bounds_table(&mut w, &reports)?,
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn experiment_config(index: &str, summand: &str, run: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut c = ExperimentConfig::new(index, summand);
    c.coupling = run.coupling.coupling;
    c.joint_pmf = run.coupling.joint_pmf.clone();
    c.reps = run.reps;
    c.seed = run.seed;
    c.chunk_size = run.chunk_size;
    c.jobs = run.jobs;
    c.theorems = run.selection.theorem.clone();
    c.metrics = run.selection.metric.metrics();
    c.constants = run.constants.resolve()?;
    c.coupling_reps = run.coupling_reps;
    c.out = run.out.clone();
    Ok(c)
}

fn verdict_code(violated: bool) -> ExitCode {
    if violated {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn simulate(a: &SimulateArgs) -> Result<ExitCode, CliError> {
    echo_config("simulate", a)?;
    let config = experiment_config(&a.index, &a.summand, &a.run)?;
    let report = run_experiment(&config)?;
    let mut w = writer(a.run.out.as_deref())?;
    match a.format {
        Format::Json => write_json(&mut w, &report)?,
        Format::Csv => output::sweep_csv(&mut w, &sweep_rows(&report))?,
        Format::Table => output::experiment_table(&mut w, &report)?,
    }
    w.flush()?;
    for v in report.verdicts.iter().filter(|v| v.verdict == randsum::montecarlo::Verdict::Violated) {
        eprintln!("violated: {} {} empirical {} band {} bound {}", v.theorem, v.metric, v.empirical, v.band, v.bound);
    }
    Ok(verdict_code(report.any_violated()))
}

fn sweep(a: &SweepArgs) -> Result<ExitCode, CliError> {
    echo_config("sweep", a)?;
    let indices = expand::expand_all(&a.index)?;
    let summands = expand::expand_all(&a.summand)?;
    // resolve every grid point before simulating so bad specs fail fast
    let mut grid = Vec::new();
    for i in &indices {
        parse_index(i)?;
        for s in &summands {
            parse_summand(s)?;
            grid.push(experiment_config(i, s, &a.run)?);
        }
    }
    let mut rows = Vec::new();
    let mut violated = false;
    for config in &grid {
        let report = run_experiment(config)?;
        violated |= report.any_violated();
        rows.extend(sweep_rows(&report));
    }
    let mut w = writer(a.run.out.as_deref())?;
    output::sweep_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(verdict_code(violated))
}

fn verify(a: &VerifyArgs) -> Result<ExitCode, CliError> {
    echo_config("verify", a)?;
    let outcomes = suites::run(a.suite, a.reps, a.seed);
    let mut w = writer(a.out.as_deref())?;
    match a.format {
        Format::Json => write_json(&mut w, &outcomes)?,
        Format::Csv => {
            let mut out = csv::Writer::from_writer(&mut w);
            for o in &outcomes {
                out.serialize(o)?;
            }
            out.flush()?;
        }
        Format::Table => output::outcomes_table(&mut w, &outcomes)?,
    }
    w.flush()?;
    Ok(verdict_code(outcomes.iter().any(|o| !o.pass)))
}
