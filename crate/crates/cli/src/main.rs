//! Single entry-point CLI over the solver library: `solve`, `gen`, `bench`
//! and `jooken` subcommands.
//!
//! Every run prints one machine-readable result to stdout (JSON by default,
//! CSV on request) and keeps diagnostics on stderr. Exit codes: 0 success,
//! 1 usage error, 2 data or solve error. All randomness flows from
//! `--seed`; without it a fixed default keeps runs reproducible.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use xdp_knapsack::harness::{
    self, Execution, KahanSum, ReportFormat, ReportScale, TrialStats,
};
use xdp_knapsack::instance::{sort_by_ratio, Instance};
use xdp_knapsack::instgen::{gen_trial, CapacityRule, TrialConfig, DEFAULT_K_TOLERANCE};
use xdp_knapsack::xdp::{self, XdpConfig, DEFAULT_GROWTH};
use xdp_knapsack::{greedy, jooken, oracle};

/// Seed used when `--seed` is absent; fixed so CI runs stay deterministic.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "xdpk", version, about = "Approximate 0/1 knapsack solver and benchmark harness")]
struct Cli {
    /// Master seed for anything random (default: a fixed constant,
    /// never the wall clock).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress the stdout copy of reports that also go to a file.
    #[arg(long, global = true)]
    quiet: bool,

    /// Output format for stdout results.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Xdp,
    Greedy,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Desk,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file (core JSON format).
    Solve {
        /// Solver to run; `exact` picks an oracle by n and refuses n > 40.
        #[arg(long, value_enum)]
        algo: Algo,
        /// Bin-count growth constant g for the xdp solver.
        #[arg(long, default_value_t = DEFAULT_GROWTH)]
        g: f64,
        /// Include the chosen 1-based item indices in the output.
        #[arg(long)]
        emit_selection: bool,
        /// Instance file: {"capacity": c, "items": [[profit, weight], ...]}.
        file: PathBuf,
    },
    /// Generate a random trial instance into a JSON file.
    Gen {
        /// Number of items.
        #[arg(long)]
        n: usize,
        /// Calibrate the capacity until greedy selects this many objects.
        #[arg(long)]
        fixed_k: Option<usize>,
        /// Output path for the instance JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce one of the report tables and write it as a report file.
    Bench {
        /// Table number (1: fixed k=50 sweep over n; 2: fixed-k sweep;
        /// 3: free trials over n; 4: greedy first-reject error sweep).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        table: u8,
        /// Trials per cell (overrides the scale preset).
        #[arg(long)]
        trials: Option<usize>,
        /// Preset trial counts and size lists.
        #[arg(long, value_enum, default_value_t = Scale::Desk)]
        scale: Scale,
        /// Report output path.
        #[arg(long)]
        out: PathBuf,
        /// Run the trials on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Solve a directory of hard benchmark instances against their
    /// recorded optima and emit a per-instance CSV report.
    Jooken {
        /// Dataset directory (searched recursively for *.in files).
        #[arg(long)]
        dir: PathBuf,
        /// Evaluate at most this many instances.
        #[arg(long)]
        limit: Option<usize>,
        /// CSV report output path.
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = err.print();
                    ExitCode::from(1)
                }
            };
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", json!({ "error": format!("{err:#}") }));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.command {
        Command::Solve {
            algo,
            g,
            emit_selection,
            file,
        } => solve(algo, g, emit_selection, &file, cli.format),
        Command::Gen { n, fixed_k, out } => gen(n, seed, fixed_k, &out, cli.format),
        Command::Bench {
            table,
            trials,
            scale,
            out,
            sequential,
        } => bench(table, trials, scale, seed, &out, sequential, cli.format, cli.quiet),
        Command::Jooken { dir, limit, report } => jooken_eval(&dir, limit, &report, cli.format),
    }
}

/// One solve result; field set depends on the solver
/// (`e`/`pmax`/`bins` for xdp, `gefr` for greedy, `method` for exact).
#[derive(Serialize)]
struct SolveReport {
    profit: f64,
    weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pmax: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gefr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selection: Option<Vec<u32>>,
    runtime_seconds: f64,
}

impl SolveReport {
    fn to_csv(&self) -> String {
        let opt_f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from(
            "profit,weight,e,pmax,bins,gefr,method,selection,runtime_seconds\n",
        );
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            self.profit,
            self.weight,
            opt_f(self.e),
            opt_f(self.pmax),
            self.bins.map(|b| b.to_string()).unwrap_or_default(),
            opt_f(self.gefr),
            self.method.unwrap_or_default(),
            self.selection
                .as_ref()
                .map(|sel| {
                    sel.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default(),
            self.runtime_seconds,
        ));
        out
    }
}

fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read instance file {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{} is not a valid instance file", path.display()))
}

fn solve(
    algo: Algo,
    g: f64,
    emit_selection: bool,
    file: &Path,
    format: Option<OutputFormat>,
) -> anyhow::Result<()> {
    let inst = read_instance(file)?;
    let report = match algo {
        Algo::Xdp => {
            let started = Instant::now();
            let order = sort_by_ratio(&inst);
            let solution = xdp::solve(
                &inst,
                &order,
                &XdpConfig {
                    growth: g,
                    ..XdpConfig::default()
                },
            )?;
            SolveReport {
                profit: solution.profit,
                weight: solution.weight,
                e: Some(solution.max_error),
                pmax: Some(solution.pmax),
                bins: Some(solution.bins),
                gefr: None,
                method: None,
                selection: emit_selection.then_some(solution.selection.chosen),
                runtime_seconds: started.elapsed().as_secs_f64(),
            }
        }
        Algo::Greedy => {
            let started = Instant::now();
            let order = sort_by_ratio(&inst);
            let greedy_report = greedy::greedy_plus(&inst, &order);
            SolveReport {
                profit: greedy_report.profit(),
                weight: greedy_report.weight(),
                e: Some(greedy_report.certified_error()),
                pmax: Some(greedy_report.pmax),
                bins: None,
                gefr: Some(greedy_report.gefr),
                method: None,
                selection: emit_selection.then_some(greedy_report.selection.chosen),
                runtime_seconds: started.elapsed().as_secs_f64(),
            }
        }
        Algo::Exact => {
            let started = Instant::now();
            let exact = oracle::exact_auto(&inst)?;
            SolveReport {
                profit: exact.optimum,
                weight: exact.selection.weight_sum,
                e: None,
                pmax: None,
                bins: None,
                gefr: None,
                method: Some(exact.method.name()),
                selection: emit_selection.then_some(exact.selection.chosen),
                runtime_seconds: started.elapsed().as_secs_f64(),
            }
        }
    };

    match format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => println!("{}", serde_json::to_string(&report)?),
        OutputFormat::Csv => print!("{}", report.to_csv()),
    }
    Ok(())
}

fn gen(
    n: usize,
    seed: u64,
    fixed_k: Option<usize>,
    out: &Path,
    format: Option<OutputFormat>,
) -> anyhow::Result<()> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    if let Some(k) = fixed_k {
        if k == 0 || k > n {
            bail!("--fixed-k must be in 1..=n (got k={k}, n={n})");
        }
    }
    let cfg = TrialConfig {
        n,
        seed,
        rule: match fixed_k {
            Some(target) => CapacityRule::FixedK { target },
            None => CapacityRule::RandomFraction,
        },
        k_tolerance: DEFAULT_K_TOLERANCE,
    };
    let inst = gen_trial(&cfg)?;
    fs::write(out, serde_json::to_string(&inst)?)
        .with_context(|| format!("cannot write {}", out.display()))?;

    match format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => println!(
            "{}",
            json!({
                "path": out.display().to_string(),
                "n": inst.len(),
                "capacity": inst.capacity(),
                "seed": seed,
            })
        ),
        OutputFormat::Csv => {
            println!("path,n,capacity,seed");
            println!("{},{},{},{}", out.display(), inst.len(), inst.capacity(), seed);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    table: u8,
    trials: Option<usize>,
    scale: Scale,
    seed: u64,
    out: &Path,
    sequential: bool,
    format: Option<OutputFormat>,
    quiet: bool,
) -> anyhow::Result<()> {
    let scale = match scale {
        Scale::Desk => ReportScale::Desk,
        Scale::Paper => ReportScale::Paper,
    };
    let execution = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let stats = harness::run_table(table, scale, trials, seed, execution);

    let format = match format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => ReportFormat::Csv,
        OutputFormat::Json => ReportFormat::Json,
    };
    harness::write_report(&stats, format, out)?;
    if !quiet {
        match format {
            ReportFormat::Csv => print!("{}", harness::render_csv(&stats)),
            ReportFormat::Json => println!("{}", harness::render_json(&stats)?),
        }
    }
    report_failures(&stats);
    Ok(())
}

fn report_failures(stats: &[TrialStats]) {
    let failures: usize = stats.iter().map(|row| row.failures).sum();
    if failures > 0 {
        eprintln!("warning: {failures} trial(s) failed to generate and were excluded");
    }
}

fn jooken_eval(
    dir: &Path,
    limit: Option<usize>,
    report_path: &Path,
    format: Option<OutputFormat>,
) -> anyhow::Result<()> {
    let mut paths = jooken::find_instances(dir)
        .with_context(|| format!("cannot scan {}", dir.display()))?;
    if paths.is_empty() {
        bail!("no *.in instance files under {}", dir.display());
    }
    if let Some(limit) = limit {
        paths.truncate(limit);
    }

    let config = XdpConfig::default();
    let mut rows = Vec::new();
    let mut failed = 0usize;
    for path in &paths {
        match jooken::evaluate_file(path, &config) {
            Ok(eval) => rows.push(eval),
            Err(err) => {
                failed += 1;
                eprintln!("warning: skipping {}: {err}", path.display());
            }
        }
    }
    if rows.is_empty() {
        bail!("all {failed} instance file(s) under {} failed to evaluate", dir.display());
    }

    let mut csv = String::from(
        "path,n,greedy_k,xdp_k,recorded_optimum,profit,pmax,fractional_error,certified_e,runtime_seconds,exceeds_recorded\n",
    );
    let (mut n, mut gk, mut xk, mut err, mut cert, mut time) = (
        KahanSum::default(),
        KahanSum::default(),
        KahanSum::default(),
        KahanSum::default(),
        KahanSum::default(),
        KahanSum::default(),
    );
    let mut pmax_violations = 0usize;
    let mut exceeds = 0usize;
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.path.display(),
            row.n,
            row.greedy_k,
            row.xdp_k,
            row.recorded_optimum,
            row.profit,
            row.pmax,
            row.fractional_error,
            row.certified_error,
            row.runtime_seconds,
            row.exceeds_recorded,
        ));
        n.add(row.n as f64);
        gk.add(row.greedy_k as f64);
        xk.add(row.xdp_k as f64);
        err.add(row.fractional_error);
        cert.add(row.certified_error);
        time.add(row.runtime_seconds);
        if row.recorded_optimum > row.pmax {
            pmax_violations += 1;
        }
        if row.exceeds_recorded {
            exceeds += 1;
        }
    }
    let count = rows.len() as f64;
    csv.push_str(&format!(
        "SUMMARY,{},{},{},,,,{},{},{},{}\n",
        n.value() / count,
        gk.value() / count,
        xk.value() / count,
        err.value() / count,
        cert.value() / count,
        time.value() / count,
        exceeds,
    ));
    fs::write(report_path, &csv)
        .with_context(|| format!("cannot write {}", report_path.display()))?;

    let summary = json!({
        "files": rows.len(),
        "files_failed": failed,
        "mean_n": n.value() / count,
        "mean_greedy_k": gk.value() / count,
        "mean_xdp_k": xk.value() / count,
        "mean_fractional_error": err.value() / count,
        "mean_certified_error": cert.value() / count,
        "pmax_violations": pmax_violations,
        "profit_exceeds_recorded": exceeds,
        "report": report_path.display().to_string(),
    });
    match format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => println!("{summary}"),
        OutputFormat::Csv => {
            println!("files,mean_fractional_error,pmax_violations");
            println!(
                "{},{},{}",
                rows.len(),
                err.value() / count,
                pmax_violations
            );
        }
    }
    Ok(())
}
