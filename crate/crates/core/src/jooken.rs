//! Reader and evaluator for the published hard benchmark instances.
//!
//! File layout: line 1 holds `n`, lines 2..n+1 hold `index profit weight`
//! with integer values, and the final line holds the capacity. The recorded
//! optimal profit is looked up next to the instance file:
//!
//! 1. a sibling file with the extension replaced by `.opt` (for
//!    `test.in`, `test.opt`) containing the optimum as a single number, or
//! 2. an `optima.csv` in the instance's directory or any ancestor, with
//!    `relative/path/to/instance,optimum` lines resolved against the
//!    directory containing the csv.
//!
//! The dataset itself is not vendored; `scripts/fetch_jooken.sh` downloads
//! it and writes a checksum manifest. Everything dataset-dependent skips
//! cleanly when the files are absent.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::greedy;
use crate::instance::{sort_by_ratio, Instance, Item};
use crate::xdp;

/// Largest integer magnitude that is exactly representable in an f64.
pub const MAX_EXACT_INTEGER: i64 = 1 << 53;

/// A parsed hard instance with its recorded optimal profit.
#[derive(Clone, Debug, PartialEq)]
pub struct HardInstance {
    pub instance: Instance,
    pub recorded_optimum: f64,
    pub source_path: PathBuf,
}

/// Fractional gap of a solver profit against the recorded optimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimumGap {
    /// `(recorded - profit) / recorded`.
    pub fractional_error: f64,
    /// The profit exceeded the recorded optimum — either the record or the
    /// solver result is wrong, so callers must surface this.
    pub exceeds_recorded: bool,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_integer(path: &Path, line: usize, token: &str, what: &str) -> Result<i64> {
    let value: i64 = token
        .parse()
        .map_err(|_| parse_error(path, line, format!("{what} is not an integer: {token:?}")))?;
    if value.abs() > MAX_EXACT_INTEGER {
        return Err(parse_error(
            path,
            line,
            format!("{what} {value} exceeds the 53-bit exact-integer range of doubles"),
        ));
    }
    Ok(value)
}

/// Parses one instance file and resolves its recorded optimum.
pub fn parse_jooken(path: &Path) -> Result<HardInstance> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, first) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty file, expected item count"))?;
    let n = parse_integer(path, 1, first.trim(), "item count")?;
    if n < 1 {
        return Err(parse_error(path, 1, format!("item count must be >= 1, got {n}")));
    }
    let n = n as usize;

    let mut items = Vec::with_capacity(n);
    for expected_index in 1..=n {
        let (line_idx, line) = lines.next().ok_or_else(|| {
            parse_error(
                path,
                expected_index + 1,
                format!("unexpected end of file: declared {n} items"),
            )
        })?;
        let line_no = line_idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(parse_error(
                path,
                line_no,
                format!("expected 3 tokens (index profit weight), got {}", tokens.len()),
            ));
        }
        let index = parse_integer(path, line_no, tokens[0], "item index")?;
        if index != expected_index as i64 {
            return Err(parse_error(
                path,
                line_no,
                format!("item index {index} out of order, expected {expected_index}"),
            ));
        }
        let profit = parse_integer(path, line_no, tokens[1], "profit")?;
        let weight = parse_integer(path, line_no, tokens[2], "weight")?;
        if profit < 0 {
            return Err(parse_error(path, line_no, format!("profit must be >= 0, got {profit}")));
        }
        if weight < 1 {
            return Err(parse_error(path, line_no, format!("weight must be >= 1, got {weight}")));
        }
        items.push(Item {
            profit: profit as f64,
            weight: weight as f64,
        });
    }

    let (cap_idx, cap_line) = lines
        .next()
        .ok_or_else(|| parse_error(path, n + 2, "unexpected end of file: missing capacity"))?;
    let capacity = parse_integer(path, cap_idx + 1, cap_line.trim(), "capacity")?;
    if capacity < 1 {
        return Err(parse_error(
            path,
            cap_idx + 1,
            format!("capacity must be >= 1, got {capacity}"),
        ));
    }

    for (line_idx, line) in lines {
        if !line.trim().is_empty() {
            return Err(parse_error(path, line_idx + 1, "unexpected trailing content"));
        }
    }

    let instance = Instance::new(items, capacity as f64)
        .map_err(|e| parse_error(path, 1, e.to_string()))?;
    let recorded_optimum = find_recorded_optimum(path)?;
    if recorded_optimum <= 0.0 {
        return Err(Error::DataIntegrity(format!(
            "{}: recorded optimum must be positive, got {recorded_optimum}",
            path.display()
        )));
    }

    Ok(HardInstance {
        instance,
        recorded_optimum,
        source_path: path.to_path_buf(),
    })
}

fn find_recorded_optimum(instance_path: &Path) -> Result<f64> {
    let opt_path = instance_path.with_extension("opt");
    if opt_path.is_file() {
        let text = fs::read_to_string(&opt_path)?;
        let token = text.split_whitespace().next().ok_or_else(|| {
            parse_error(&opt_path, 1, "expected the recorded optimum as a single number")
        })?;
        return token
            .parse::<f64>()
            .map_err(|_| parse_error(&opt_path, 1, format!("not a number: {token:?}")));
    }

    let mut dir = instance_path.parent();
    while let Some(d) = dir {
        let manifest = d.join("optima.csv");
        if manifest.is_file() {
            let relative = instance_path
                .strip_prefix(d)
                .expect("instance path lies under the manifest directory");
            return lookup_manifest(&manifest, relative);
        }
        dir = d.parent();
    }

    Err(parse_error(
        &opt_path,
        1,
        "no recorded optimum: neither a sibling .opt file nor an optima.csv in any ancestor directory",
    ))
}

fn lookup_manifest(manifest: &Path, relative: &Path) -> Result<f64> {
    let text = fs::read_to_string(manifest)?;
    let wanted = relative.to_string_lossy();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (entry_path, value) = line.rsplit_once(',').ok_or_else(|| {
            parse_error(manifest, idx + 1, "expected `relative/path,optimum`")
        })?;
        if entry_path.trim() == wanted {
            return value
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_error(manifest, idx + 1, format!("not a number: {value:?}")));
        }
    }
    Err(parse_error(
        manifest,
        1,
        format!("no entry for {wanted}"),
    ))
}

/// Fractional error of `profit` against the recorded optimum.
pub fn evaluate_against_optimum(hard: &HardInstance, profit: f64) -> Result<OptimumGap> {
    if hard.recorded_optimum <= 0.0 {
        return Err(Error::DataIntegrity(format!(
            "{}: recorded optimum must be positive",
            hard.source_path.display()
        )));
    }
    let fractional_error = (hard.recorded_optimum - profit) / hard.recorded_optimum;
    Ok(OptimumGap {
        fractional_error,
        exceeds_recorded: fractional_error < 0.0,
    })
}

/// One solved hard instance, ready for report emission.
///
/// Which subset size the published per-file `k` refers to is ambiguous, so
/// both the greedy and the solver selection sizes are reported.
#[derive(Clone, Debug, PartialEq)]
pub struct HardEvaluation {
    pub path: PathBuf,
    pub n: usize,
    pub greedy_k: usize,
    pub xdp_k: usize,
    pub recorded_optimum: f64,
    pub profit: f64,
    pub pmax: f64,
    pub fractional_error: f64,
    pub certified_error: f64,
    pub exceeds_recorded: bool,
    pub runtime_seconds: f64,
}

/// Parses and solves one instance file.
pub fn evaluate_file(path: &Path, config: &xdp::XdpConfig) -> Result<HardEvaluation> {
    let hard = parse_jooken(path)?;
    let inst = &hard.instance;

    let started = Instant::now();
    let order = sort_by_ratio(inst);
    let report = greedy::greedy_plus(inst, &order);
    let solution = xdp::solve_with_bound(inst, &order, config, report.pmax)?;
    let runtime_seconds = started.elapsed().as_secs_f64();

    let gap = evaluate_against_optimum(&hard, solution.profit)?;
    Ok(HardEvaluation {
        path: hard.source_path,
        n: inst.len(),
        greedy_k: report.selection.size(),
        xdp_k: solution.selection.size(),
        recorded_optimum: hard.recorded_optimum,
        profit: solution.profit,
        pmax: solution.pmax,
        fractional_error: gap.fractional_error,
        certified_error: solution.max_error,
        exceeds_recorded: gap.exceeds_recorded,
        runtime_seconds,
    })
}

/// Instance files (extension `.in`) under `dir`, recursively, in sorted
/// order for reproducible reports.
pub fn find_instances(dir: &Path) -> Result<Vec<PathBuf>> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(&path, out)?;
            } else if path.extension().is_some_and(|ext| ext == "in") {
                out.push(path);
            }
        }
        Ok(())
    }
    let mut paths = Vec::new();
    walk(dir, &mut paths)?;
    paths.sort();
    Ok(paths)
}
