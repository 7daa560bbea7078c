//! Command-line front end for the `fibercount` library.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fibercount::pipeline::{prepare, render_report};
use fibercount::report::{rational_string, render_rows_csv, write_output};
use fibercount::sieve::{choose_parameters_with, classify_range_with, SieveParams};
use fibercount::{hensel_locate, invariants, parse_factored_poly, run_superelliptic, Error, OutputFormat, RunConfig};
use num_bigint::BigInt;
use serde_json::json;

#[derive(Parser)]
#[command(name = "fibercount", version, about = "Count distinct radical fields along superelliptic fibers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local invariants of the radical kernel of the polynomial.
    Analyze(PolyArgs),
    /// Sieve parameters making at most half the values exceptional.
    Params(PolyArgs),
    /// Classify f(1..N) as (S, ell)-square-free or exceptional.
    Sieve(RunArgs),
    /// Full pipeline: certified lower bound on distinct fields.
    CountFields(RunArgs),
    /// Locate the root that n is p-adically close to.
    Hensel(HenselArgs),
}

#[derive(Args)]
struct PolyArgs {
    /// e.g. "lead=1; roots=0:1,1:1"
    #[arg(long)]
    poly: String,
    #[arg(long, default_value_t = 2)]
    e: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, default_value_t = 2)]
    e: u64,
    #[arg(long = "N")]
    n: Option<u64>,
    /// Comma-separated primes overriding the chosen S.
    #[arg(long = "S", value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    #[arg(long)]
    ell: Option<u32>,
    /// Primes ramified in the base field, added to S.
    #[arg(long, value_delimiter = ',')]
    ramified: Option<Vec<u64>>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct HenselArgs {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    n: BigInt,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_output(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes()).context("writing to stdout")?,
    }
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        let mut config = RunConfig::new(self.poly.clone(), self.e);
        config.n = self.n;
        config.primes = self.primes.as_ref().map(|v| v.iter().copied().collect());
        config.ell = self.ell;
        config.extra_ramified_primes = self.ramified.iter().flatten().copied().collect();
        config.jobs = self.jobs;
        config
    }
}

fn analyze(args: &PolyArgs) -> anyhow::Result<()> {
    let prepared = prepare(&args.poly, args.e)?;
    let inv = invariants(&prepared.kernel)?;
    let value = json!({
        "poly": prepared.original.to_string(),
        "e": args.e,
        "scale": prepared.scale.to_string(),
        "kernel": prepared.kernel.to_string(),
        "d": inv.degree,
        "U": inv.u.to_string(),
        "V": inv.v.to_string(),
        "S0": inv.s0,
        "ell0": inv.ell0,
        "lambda": inv.lambda_table,
        "delta": inv.delta_table,
    });
    emit(args.out.as_ref(), &pretty(&value))
}

fn params(args: &PolyArgs) -> anyhow::Result<()> {
    let prepared = prepare(&args.poly, args.e)?;
    let inv = invariants(&prepared.kernel)?;
    let chosen = choose_parameters_with(&inv)?;
    let value = json!({
        "poly": prepared.original.to_string(),
        "kernel": prepared.kernel.to_string(),
        "S1": chosen.primes,
        "ell1": chosen.ell,
        "P1": chosen.p1,
        "N0": chosen.n0,
    });
    emit(args.out.as_ref(), &pretty(&value))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match jobs {
        Some(j) => Ok(rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build()?.install(f)),
        None => Ok(f()),
    }
}

fn sieve(args: &RunArgs) -> anyhow::Result<()> {
    let format: OutputFormat = args.format.parse()?;
    let prepared = prepare(&args.poly, args.e)?;
    let inv = invariants(&prepared.kernel)?;
    let chosen = choose_parameters_with(&inv)?;
    let primes: BTreeSet<u64> = match &args.primes {
        Some(v) => v.iter().copied().collect(),
        None => chosen.primes.clone(),
    };
    let ell = args.ell.unwrap_or(chosen.ell);
    let n_max = args.n.unwrap_or_else(|| (10 * chosen.n0).max(1000));
    if n_max == 0 {
        return Err(Error::ZeroArgument("N must be positive").into());
    }
    let params = SieveParams { primes, ell, n_max };
    let report = with_jobs(args.jobs, || classify_range_with(&prepared.kernel, &inv, &params))??;
    let text = match format {
        OutputFormat::Csv => render_rows_csv(&report.rows),
        OutputFormat::Json => pretty(&json!({
            "poly": prepared.kernel.to_string(),
            "N": n_max,
            "S": params.primes,
            "ell": ell,
            "skipped_roots": report.skipped_roots,
            "good_count": report.good_count,
            "exceptional_count": report.exceptional_count(),
            "paper_bound": rational_string(&report.bounds.paper),
            "sharp_bound": rational_string(&report.bounds.sharp),
            "exceptional": report.exceptional().collect::<Vec<_>>(),
        })),
    };
    emit(args.out.as_ref(), &text)
}

fn count_fields(args: &RunArgs) -> anyhow::Result<bool> {
    let format: OutputFormat = args.format.parse()?;
    let report = run_superelliptic(&args.config())?;
    for line in report.verdicts() {
        eprintln!("{line}");
    }
    emit(args.out.as_ref(), &render_report(&report, format))?;
    Ok(report.summary.certified)
}

fn hensel(args: &HenselArgs) -> anyhow::Result<()> {
    let f = parse_factored_poly(&args.poly)?;
    let cert = hensel_locate(&f, &args.n, args.p)?;
    emit(args.out.as_ref(), &pretty(&serde_json::to_value(&cert)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a).map(|_| true),
        Command::Params(a) => params(a).map(|_| true),
        Command::Sieve(a) => sieve(a).map(|_| true),
        Command::CountFields(a) => count_fields(a),
        Command::Hensel(a) => hensel(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: count is below the certified floor c*N");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let refused = err.downcast_ref::<Error>().is_some_and(Error::is_hypothesis_refusal);
            ExitCode::from(if refused { 2 } else { 1 })
        }
    }
}
