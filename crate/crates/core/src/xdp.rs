//! Approximate dynamic program over `T = g·ln(n)` weight bins.
//!
//! Each bin holds the most profitable subset found so far whose exact weight
//! maps into it; objects are processed in ratio order against every occupied
//! bin, bins high to low, with in-pass overwrites. The bin count grows only
//! logarithmically with `n`, so runtime and backtrack storage are both
//! O(n log n). The returned profit carries a certified maximum error
//! computed against the greedy `Pmax` bound for the same instance.
//!
//! Object identifiers inside the table are *ranks*: positions in the ratio
//! order, 1-based, with 0 reserved as the start-of-subset sentinel and -1
//! marking an empty bin. Backtrack chains are strictly decreasing in rank.

use crate::error::{Error, Result};
use crate::greedy;
use crate::instance::{Instance, Selection};

/// Default bin-count growth constant; chosen so the table sweep costs about
/// as much as the initial ratio sort.
pub const DEFAULT_GROWTH: f64 = 12.0;

/// Number of bins for an instance of size `n`: `floor(g·ln n)`, at least 1.
pub fn bin_count(n: usize, growth: f64) -> usize {
    let t = (growth * (n as f64).ln()).floor();
    if t < 1.0 {
        1
    } else {
        t as usize
    }
}

/// Bin index for an exact subset weight: `floor(b·T/c)`, clamped so that
/// `b = c` maps to `T`.
#[inline]
pub fn bin_index(weight: f64, capacity: f64, bins: usize) -> usize {
    if weight >= capacity {
        return bins;
    }
    ((weight * bins as f64 / capacity) as usize).min(bins)
}

/// How backtracking recovers the source bin of each chain step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BacktrackBins {
    /// Follow the source bin recorded during the forward pass.
    #[default]
    Stored,
    /// Recompute the source bin from the reduced weight, `floor(b·T/c)`.
    /// Subtracting a weight does not always restore the exact source weight
    /// in double precision, so this walk can land in the wrong bin; it
    /// exists for fidelity experiments, not for production use.
    Recomputed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XdpConfig {
    /// Bin-count growth constant `g`.
    pub growth: f64,
    /// Overrides the bin count entirely (e.g. `Some(1)` reduces the solver
    /// to the greedy pass).
    pub forced_bins: Option<usize>,
    pub backtrack: BacktrackBins,
}

impl Default for XdpConfig {
    fn default() -> Self {
        Self {
            growth: DEFAULT_GROWTH,
            forced_bins: None,
            backtrack: BacktrackBins::Stored,
        }
    }
}

impl XdpConfig {
    fn validate(&self) -> Result<()> {
        match self.forced_bins {
            Some(0) => Err(Error::InvalidConfig("forced bin count must be >= 1".into())),
            Some(_) => Ok(()),
            None if self.growth.is_finite() && self.growth > 0.0 => Ok(()),
            None => Err(Error::InvalidConfig(format!(
                "growth constant must be positive and finite, got {}",
                self.growth
            ))),
        }
    }

    fn bins_for(&self, n: usize) -> usize {
        self.forced_bins.unwrap_or_else(|| bin_count(n, self.growth))
    }
}

/// The T+1 bin state plus the backtracking matrices.
///
/// `xp[j]`/`xw[j]` are the profit and weight sums of the best subset mapped
/// to bin `j`; `xo[j]` is the rank of the object that last extended it
/// (-1 = empty, 0 = the empty-subset seed in bin 0). The dense matrices
/// record, per (rank, bin) write, the predecessor rank and the source bin.
pub struct BinTable {
    bins: usize,
    capacity: f64,
    xp: Vec<f64>,
    xw: Vec<f64>,
    xo: Vec<i64>,
    order: Vec<u32>,
    back: Vec<u32>,
    backbin: Vec<u32>,
}

impl BinTable {
    fn new(n: usize, bins: usize, capacity: f64, order: &[u32]) -> Result<Self> {
        let cells = n
            .checked_add(1)
            .and_then(|rows| rows.checked_mul(bins.checked_add(1)?))
            .ok_or(Error::TableTooLarge { n, bins })?;
        let mut xo = vec![-1i64; bins + 1];
        xo[0] = 0; // objects may start a subset from bin 0
        Ok(Self {
            bins,
            capacity,
            xp: vec![0.0; bins + 1],
            xw: vec![0.0; bins + 1],
            xo,
            order: order.to_vec(),
            back: vec![0u32; cells],
            backbin: vec![0u32; cells],
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// A bin is occupied once it holds subset data (bin 0 starts occupied
    /// as the empty-subset seed).
    pub fn is_occupied(&self, bin: usize) -> bool {
        self.xo[bin] >= 0
    }

    pub fn profit_of(&self, bin: usize) -> f64 {
        self.xp[bin]
    }

    pub fn weight_of(&self, bin: usize) -> f64 {
        self.xw[bin]
    }

    /// Rank of the object that last extended `bin` (0 = seed sentinel).
    pub fn owner_rank(&self, bin: usize) -> Option<usize> {
        (self.xo[bin] >= 0).then_some(self.xo[bin] as usize)
    }

    #[inline]
    fn cell(&self, rank: usize, bin: usize) -> usize {
        rank * (self.bins + 1) + bin
    }
}

/// Outcome of the forward bin sweep, before backtracking.
pub struct ForwardPass {
    pub table: BinTable,
    /// Best profit sum seen in any bin.
    pub best_profit: f64,
    /// Bin holding that subset.
    pub best_bin: usize,
}

/// Runs the double loop: objects in ratio order, bins high to low, in-pass
/// overwrites under the strict `a > XP[k]` guard.
pub fn forward(inst: &Instance, order: &[u32], bins: usize) -> Result<ForwardPass> {
    let n = inst.len();
    assert_eq!(order.len(), n, "order must be a permutation of 1..=n");
    debug_assert!(
        order
            .windows(2)
            .all(|w| inst.item(w[0] as usize).ratio() >= inst.item(w[1] as usize).ratio()),
        "order must be nonincreasing by profit/weight ratio"
    );

    let capacity = inst.capacity();
    let mut table = BinTable::new(n, bins, capacity, order)?;
    let mut best_profit = 0.0f64;
    let mut best_bin = 0usize;

    for rank in 1..=n {
        let item = inst.item(order[rank - 1] as usize);
        let (profit, weight) = (item.profit, item.weight);
        // higher bins first; an update lands at k >= j, which this pass has
        // already visited, so no subset is ever extended twice by one object
        for j in (0..=bins).rev() {
            if table.xo[j] < 0 {
                continue;
            }
            let a = table.xp[j] + profit;
            let b = table.xw[j] + weight;
            if b <= capacity {
                let k = bin_index(b, capacity, bins);
                if a > table.xp[k] {
                    table.xp[k] = a;
                    table.xw[k] = b;
                    let cell = table.cell(rank, k);
                    table.back[cell] = table.xo[j] as u32;
                    table.backbin[cell] = j as u32;
                    table.xo[k] = rank as i64;
                    if a > best_profit {
                        best_profit = a;
                        best_bin = k;
                    }
                }
            }
        }
    }

    Ok(ForwardPass {
        table,
        best_profit,
        best_bin,
    })
}

/// Walks the chain out of `best_bin` back to the start sentinel and rebuilds
/// the selection in original item indices.
///
/// The chain must be strictly decreasing in rank; any other step is reported
/// as corruption (reachable only through [`BacktrackBins::Recomputed`] or a
/// hand-damaged table).
pub fn backtrack(
    table: &BinTable,
    best_bin: usize,
    inst: &Instance,
    mode: BacktrackBins,
) -> Result<Selection> {
    let mut ranks: Vec<usize> = Vec::new();
    let mut rank = match table.owner_rank(best_bin) {
        Some(r) => r,
        None => return Ok(Selection::empty()),
    };
    let mut bin = best_bin;
    let mut remaining = table.xw[best_bin];

    while rank > 0 {
        ranks.push(rank);
        let cell = table.cell(rank, bin);
        let next_rank = table.back[cell] as usize;
        let next_bin = match mode {
            BacktrackBins::Stored => table.backbin[cell] as usize,
            BacktrackBins::Recomputed => {
                let item = inst.item(table.order[rank - 1] as usize);
                remaining = (remaining - item.weight).max(0.0);
                bin_index(remaining, table.capacity, table.bins)
            }
        };
        if next_rank >= rank {
            return Err(Error::BacktrackCorrupted {
                from: rank,
                to: next_rank,
            });
        }
        rank = next_rank;
        bin = next_bin;
    }

    let chosen = ranks
        .into_iter()
        .map(|r| table.order[r - 1])
        .collect::<Vec<u32>>();
    Ok(Selection::from_indices(inst, chosen))
}

/// A certified approximate solution.
#[derive(Clone, Debug, PartialEq)]
pub struct XdpSolution {
    pub selection: Selection,
    /// Best profit sum from the forward pass.
    pub profit: f64,
    /// Weight of the winning bin's subset.
    pub weight: f64,
    pub best_bin: usize,
    /// Bin count T used for this solve.
    pub bins: usize,
    /// Greedy upper bound on any feasible profit.
    pub pmax: f64,
    /// Certified maximum fractional error `(pmax - profit) / pmax`.
    pub max_error: f64,
}

/// Full certified solve in one call: runs the greedy pass for `Pmax`, the
/// forward sweep, and the backtrack.
///
/// `order` must come from [`crate::instance::sort_by_ratio`]; greedy and the
/// dynamic program share that one sort.
pub fn solve(inst: &Instance, order: &[u32], config: &XdpConfig) -> Result<XdpSolution> {
    let pmax = greedy::greedy_plus(inst, order).pmax;
    solve_with_bound(inst, order, config, pmax)
}

/// Solve against a precomputed `Pmax`, for callers that already ran the
/// greedy pass and need its report as well.
pub fn solve_with_bound(
    inst: &Instance,
    order: &[u32],
    config: &XdpConfig,
    pmax: f64,
) -> Result<XdpSolution> {
    config.validate()?;
    let bins = config.bins_for(inst.len());
    let pass = forward(inst, order, bins)?;
    let selection = backtrack(&pass.table, pass.best_bin, inst, config.backtrack)?;
    Ok(XdpSolution {
        selection,
        profit: pass.best_profit,
        weight: pass.table.xw[pass.best_bin],
        best_bin: pass.best_bin,
        bins,
        pmax,
        max_error: greedy::certified_error(pmax, pass.best_profit),
    })
}
