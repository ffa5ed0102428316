//! Experiment driver: batched trials, aggregation, report emission.
//!
//! Trials inside a batch are independent jobs; with the `parallel` feature
//! they run on the rayon pool (worker count via `RAYON_NUM_THREADS`),
//! otherwise sequentially. Every trial derives its own generator seed from
//! (cell seed, trial index), and aggregation folds outcomes in trial-index
//! order with compensated summation, so the resulting statistics do not
//! depend on scheduling — only the runtime fields vary between runs.
//!
//! The timed interval of a trial covers the ratio sort, the greedy pass and
//! the full dynamic program including backtracking; generation and I/O stay
//! outside it.

use std::path::Path;
use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::greedy;
use crate::instance::sort_by_ratio;
use crate::instgen::{derive_seed, CapacityRule, TrialConfig, DEFAULT_K_TOLERANCE};
use crate::xdp::{self, XdpConfig, DEFAULT_GROWTH};

/// How a batch distributes its trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled and
    /// degrades to sequential execution otherwise.
    #[default]
    Parallel,
}

/// Everything measured on a single solved trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub n: usize,
    /// Certified maximum fractional error of the solver result.
    pub e: f64,
    /// Greedy maximum fractional error at first reject.
    pub gefr: f64,
    /// Final greedy selection size (the `k` reported by the tables).
    pub greedy_k: usize,
    /// Solver selection size.
    pub xdp_k: usize,
    pub profit: f64,
    pub pmax: f64,
    pub runtime_seconds: f64,
}

/// One cell of trials: a size, a capacity rule and a trial count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Batch {
    pub n: usize,
    pub rule: CapacityRule,
    pub trials: usize,
    /// Cell seed; trial `i` generates with `derive_seed(seed, i)`.
    pub seed: u64,
    pub growth: f64,
}

/// Outcomes of a batch plus the number of trials that failed to generate
/// or solve (excluded from all means).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchResult {
    pub outcomes: Vec<TrialOutcome>,
    pub failures: usize,
}

impl BatchResult {
    fn extend(&mut self, other: BatchResult) {
        self.outcomes.extend(other.outcomes);
        self.failures += other.failures;
    }
}

/// Generates and solves one trial.
pub fn run_trial(cfg: &TrialConfig, growth: f64) -> Result<TrialOutcome> {
    let inst = crate::instgen::gen_trial(cfg)?;

    let started = Instant::now();
    let order = sort_by_ratio(&inst);
    let report = greedy::greedy_plus(&inst, &order);
    let solution = xdp::solve_with_bound(
        &inst,
        &order,
        &XdpConfig {
            growth,
            ..XdpConfig::default()
        },
        report.pmax,
    )?;
    let runtime_seconds = started.elapsed().as_secs_f64();

    Ok(TrialOutcome {
        n: inst.len(),
        e: solution.max_error,
        gefr: report.gefr,
        greedy_k: report.selection.size(),
        xdp_k: solution.selection.size(),
        profit: solution.profit,
        pmax: solution.pmax,
        runtime_seconds,
    })
}

/// Runs a batch of independently seeded trials.
pub fn run_batch(batch: &Batch, execution: Execution) -> BatchResult {
    let run_one = |index: usize| {
        let cfg = TrialConfig {
            n: batch.n,
            seed: derive_seed(batch.seed, index as u64),
            rule: batch.rule,
            k_tolerance: DEFAULT_K_TOLERANCE,
        };
        run_trial(&cfg, batch.growth)
    };
    let results = map_indices(batch.trials, execution, run_one);

    let mut out = BatchResult::default();
    for result in results {
        match result {
            Ok(outcome) => out.outcomes.push(outcome),
            Err(_) => out.failures += 1,
        }
    }
    out
}

#[cfg(feature = "parallel")]
fn map_indices<T, F>(count: usize, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        Execution::Sequential => (0..count).map(f).collect(),
        Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_indices<T, F>(count: usize, _execution: Execution, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Kahan compensated accumulator; keeps long means stable to ~1e-16
/// regardless of summation length.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Whether a table row pools fixed-k trials or free-capacity trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KMode {
    Free,
    Fixed(usize),
}

/// Aggregated statistics over one table row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub k_mode: KMode,
    /// Instance size of the row; `None` for rows pooled across sizes.
    pub n: Option<usize>,
    pub trials: usize,
    pub failures: usize,
    pub mean_e: f64,
    /// `mean_e * k` for fixed-k rows, `mean_e * mean_k` for free rows.
    pub e_times_k: f64,
    pub mean_gefr: f64,
    pub mean_k: f64,
    pub mean_runtime_seconds: f64,
}

/// Folds outcomes in their stored order with compensated sums.
pub fn aggregate(result: &BatchResult, k_mode: KMode, n: Option<usize>) -> TrialStats {
    let trials = result.outcomes.len();
    let (mut e, mut gefr, mut k, mut runtime) = (
        KahanSum::default(),
        KahanSum::default(),
        KahanSum::default(),
        KahanSum::default(),
    );
    for outcome in &result.outcomes {
        e.add(outcome.e);
        gefr.add(outcome.gefr);
        k.add(outcome.greedy_k as f64);
        runtime.add(outcome.runtime_seconds);
    }
    let denom = trials.max(1) as f64;
    let mean_e = e.value() / denom;
    let mean_k = k.value() / denom;
    TrialStats {
        k_mode,
        n,
        trials,
        failures: result.failures,
        mean_e,
        e_times_k: match k_mode {
            KMode::Fixed(target) => mean_e * target as f64,
            KMode::Free => mean_e * mean_k,
        },
        mean_gefr: gefr.value() / denom,
        mean_k,
        mean_runtime_seconds: runtime.value() / denom,
    }
}

/// Pool of instance sizes used by the fixed-k sweep tables; each fixed k
/// pools every ladder size with n >= k.
pub const POOL_N_LADDER: [usize; 5] = [10, 100, 1_000, 10_000, 100_000];

fn table_seed(master: u64, table: u64, cell: usize) -> u64 {
    derive_seed(derive_seed(master, table), cell as u64)
}

/// Mean certified error at fixed k = 50 for each instance size.
pub fn run_table1(
    trials_per_n: usize,
    n_list: &[usize],
    seed: u64,
    execution: Execution,
) -> Vec<TrialStats> {
    n_list
        .iter()
        .enumerate()
        .map(|(cell, &n)| {
            let batch = Batch {
                n,
                rule: CapacityRule::FixedK { target: 50 },
                trials: trials_per_n,
                seed: table_seed(seed, 1, cell),
                growth: DEFAULT_GROWTH,
            };
            let result = run_batch(&batch, execution);
            aggregate(&result, KMode::Fixed(50), Some(n))
        })
        .collect()
}

/// Mean certified error per fixed k, pooled over every ladder size that can
/// hold k objects.
pub fn run_table2(
    trials_per_cell: usize,
    k_list: &[usize],
    seed: u64,
    execution: Execution,
) -> Vec<TrialStats> {
    run_fixed_k_pool(trials_per_cell, k_list, seed, 2, execution)
}

/// Free-capacity trials per instance size: mean error, mean solve time and
/// mean greedy k.
pub fn run_table3(
    trials_per_n: usize,
    n_list: &[usize],
    seed: u64,
    execution: Execution,
) -> Vec<TrialStats> {
    n_list
        .iter()
        .enumerate()
        .map(|(cell, &n)| {
            let batch = Batch {
                n,
                rule: CapacityRule::RandomFraction,
                trials: trials_per_n,
                seed: table_seed(seed, 3, cell),
                growth: DEFAULT_GROWTH,
            };
            let result = run_batch(&batch, execution);
            aggregate(&result, KMode::Free, Some(n))
        })
        .collect()
}

/// Mean greedy first-reject error per fixed k, pooled like
/// [`run_table2`]; compared downstream against the 0.5/k reference.
pub fn run_table4(
    trials_per_cell: usize,
    k_list: &[usize],
    seed: u64,
    execution: Execution,
) -> Vec<TrialStats> {
    run_fixed_k_pool(trials_per_cell, k_list, seed, 4, execution)
}

fn run_fixed_k_pool(
    trials_per_cell: usize,
    k_list: &[usize],
    seed: u64,
    table: u64,
    execution: Execution,
) -> Vec<TrialStats> {
    k_list
        .iter()
        .enumerate()
        .map(|(row, &k)| {
            let mut pooled = BatchResult::default();
            for (col, &n) in POOL_N_LADDER.iter().enumerate() {
                if n < k {
                    continue;
                }
                let batch = Batch {
                    n,
                    rule: CapacityRule::FixedK { target: k },
                    trials: trials_per_cell,
                    seed: table_seed(seed, table, row * POOL_N_LADDER.len() + col),
                    growth: DEFAULT_GROWTH,
                };
                pooled.extend(run_batch(&batch, execution));
            }
            aggregate(&pooled, KMode::Fixed(k), None)
        })
        .collect()
}

/// Trial counts and size lists for reproduction runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportScale {
    /// Reduced counts for desk-scale reruns (documented in the README).
    Desk,
    /// The published trial counts and size ranges.
    Paper,
}

/// (trials per cell, n or k list) for each table at the given scale.
pub fn preset(table: u8, scale: ReportScale) -> (usize, Vec<usize>) {
    match (table, scale) {
        (1, ReportScale::Desk) => (200, vec![100, 1_000, 10_000]),
        (1, ReportScale::Paper) => (1_000, vec![100, 1_000, 10_000, 100_000]),
        (2, ReportScale::Desk) | (4, ReportScale::Desk) => (100, vec![5, 50, 500]),
        (2, ReportScale::Paper) | (4, ReportScale::Paper) => {
            (1_000, vec![5, 50, 500, 5_000, 50_000])
        }
        (3, ReportScale::Desk) => (50, vec![1_000, 10_000, 100_000]),
        (3, ReportScale::Paper) => {
            (1_000, vec![10, 100, 1_000, 10_000, 100_000, 1_000_000])
        }
        _ => panic!("unknown table {table}; expected 1..=4"),
    }
}

/// Runs one table at a scale (optionally overriding the per-cell trial
/// count) and returns its rows.
pub fn run_table(
    table: u8,
    scale: ReportScale,
    trials_override: Option<usize>,
    seed: u64,
    execution: Execution,
) -> Vec<TrialStats> {
    let (default_trials, sizes) = preset(table, scale);
    let trials = trials_override.unwrap_or(default_trials);
    match table {
        1 => run_table1(trials, &sizes, seed, execution),
        2 => run_table2(trials, &sizes, seed, execution),
        3 => run_table3(trials, &sizes, seed, execution),
        4 => run_table4(trials, &sizes, seed, execution),
        _ => panic!("unknown table {table}; expected 1..=4"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const REPORT_CSV_HEADER: &str =
    "k_mode,k,n,trials,failures,mean_e,e_times_k,mean_gefr,gefr_ref,mean_k,mean_runtime_seconds";

/// Renders rows as CSV, byte-stable for identical stats. `gefr_ref` is the
/// 0.5/k reference for fixed-k rows and empty otherwise.
pub fn render_csv(stats: &[TrialStats]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for row in stats {
        let (mode, k, gefr_ref) = match row.k_mode {
            KMode::Fixed(k) => ("fixed", k.to_string(), (0.5 / k as f64).to_string()),
            KMode::Free => ("free", String::new(), String::new()),
        };
        let n = row.n.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{mode},{k},{n},{trials},{failures},{mean_e},{etk},{gefr},{gefr_ref},{mean_k},{runtime}\n",
            trials = row.trials,
            failures = row.failures,
            mean_e = row.mean_e,
            etk = row.e_times_k,
            gefr = row.mean_gefr,
            mean_k = row.mean_k,
            runtime = row.mean_runtime_seconds,
        ));
    }
    out
}

pub fn render_json(stats: &[TrialStats]) -> Result<String> {
    Ok(serde_json::to_string_pretty(stats).map_err(std::io::Error::other)?)
}

/// Writes a report file in the requested format.
pub fn write_report(stats: &[TrialStats], format: ReportFormat, path: &Path) -> Result<()> {
    let body = match format {
        ReportFormat::Csv => render_csv(stats),
        ReportFormat::Json => render_json(stats)?,
    };
    std::fs::write(path, body)?;
    Ok(())
}
