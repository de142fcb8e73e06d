//! Command-line front end: check PES files, generate benchmark models,
//! and run the verdict-table suite.
//!
//! Exit codes are the machine contract: 0 = valid (or: every suite cell
//! passed), 1 = invalid (or: some suite cell failed), 2 = error, resource
//! exhaustion, or oracle disagreement.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pesmc_core::benchgen::{BenchSpec, Category, Family};
use pesmc_core::checker::region::check_file_region;
use pesmc_core::checker::{check_file, CheckOptions, Verdict};
use pesmc_core::suite::{run_cells, sweep_cells, table_cells};
use pesmc_core::parse_pes;

#[derive(Parser)]
#[command(name = "pesmc", version, about = "Model checker for PES real-time specifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a PES file's initial state satisfies its START variable
    Check(CheckArgs),
    /// Generate a benchmark model as PES text
    Gen(GenArgs),
    /// Run the benchmark verdict table and compare against expectations
    Suite(SuiteArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// PES file to check
    file: PathBuf,
    /// Print a single-line machine-readable report
    #[arg(long)]
    stats: bool,
    /// Also run the explicit region-graph oracle and compare verdicts
    #[arg(long)]
    oracle: bool,
    /// Zone budget before giving up as inconclusive
    #[arg(long, value_name = "N")]
    max_zones: Option<u64>,
}

#[derive(Args)]
struct GenArgs {
    /// Benchmark family: csma, fischer, grc, leader
    family: Family,
    /// Number of processes (tracks for grc)
    n: u32,
    /// Specification category: as, bs, al, bl, m1, m2, m3, m4, m4ap
    category: Category,
    /// Override a #define constant, e.g. --param CA=2 (repeatable)
    #[arg(long, value_name = "NAME=INT")]
    param: Vec<String>,
    /// Output file (standard output if omitted)
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Sweep every feasible width up to this cap instead of the
    /// reference table
    #[arg(long, value_name = "N")]
    max_n: Option<u32>,
    /// Zone budget per cell before giving up as inconclusive
    #[arg(long, value_name = "N")]
    max_zones: Option<u64>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check(args) => cmd_check(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Suite(args) => cmd_suite(&args),
    }
}

fn options(max_zones: Option<u64>) -> CheckOptions {
    let mut opts = CheckOptions::default();
    if let Some(mz) = max_zones {
        opts.max_zones = mz;
    }
    opts
}

fn cmd_check(args: &CheckArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => return fail(&format!("{}: {e}", args.file.display())),
    };
    let file = match parse_pes(&text) {
        Ok(f) => f,
        Err(e) => return fail(&format!("{}: {e}", args.file.display())),
    };
    let outcome = match check_file(&file, &options(args.max_zones)) {
        Ok(o) => o,
        Err(e) => return fail(&format!("{}: {e}", args.file.display())),
    };
    if args.oracle {
        match check_file_region(&file) {
            Ok(oracle) if oracle == outcome.verdict => {}
            Ok(oracle) => {
                return fail(&format!(
                    "oracle disagreement: zone checker says {}, region oracle says {oracle}",
                    outcome.verdict
                ))
            }
            Err(e) => return fail(&format!("region oracle: {e}")),
        }
    }
    if args.stats {
        println!(
            "file={} verdict={} nodes={} zones={} peak={} ms={}",
            args.file.display(),
            outcome.verdict,
            outcome.stats.nodes,
            outcome.stats.zones,
            outcome.stats.peak,
            outcome.stats.ms
        );
    } else {
        println!("{}", outcome.verdict);
    }
    match outcome.verdict {
        Verdict::Valid => ExitCode::SUCCESS,
        Verdict::Invalid => ExitCode::from(1),
    }
}

fn cmd_gen(args: &GenArgs) -> ExitCode {
    let mut spec = BenchSpec::new(args.family, args.n, args.category);
    for p in &args.param {
        let Some((name, value)) = p.split_once('=') else {
            return fail(&format!("--param wants NAME=INT, got `{p}`"));
        };
        let Ok(value) = value.parse::<i64>() else {
            return fail(&format!("--param {name}: `{value}` is not an integer"));
        };
        spec = spec.with_param(name, value);
    }
    let text = match spec.generate() {
        Ok(t) => t,
        Err(e) => return fail(&e.to_string()),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                return fail(&format!("{}: {e}", path.display()));
            }
        }
        None => {
            if std::io::stdout().write_all(text.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_suite(args: &SuiteArgs) -> ExitCode {
    let cells = match args.max_n {
        Some(max_n) => sweep_cells(max_n),
        None => table_cells(),
    };
    let results = run_cells(&cells, &options(args.max_zones));
    let mut failures = 0;
    for r in &results {
        let got = match &r.got {
            Ok(v) => v.to_string(),
            Err(e) => format!("error: {e}"),
        };
        let mark = if r.pass() { "pass" } else { "FAIL" };
        println!(
            "{mark} {:<8} n={} {:<5} expected={} got={} ms={}",
            r.cell.family.to_string(),
            r.cell.n,
            r.cell.category.to_string(),
            r.expected,
            got,
            r.ms
        );
        if !r.pass() {
            failures += 1;
        }
    }
    println!("{} cells, {} failed", results.len(), failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("pesmc: {msg}");
    ExitCode::from(2)
}
