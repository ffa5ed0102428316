//! Exact solvers used only for validation.
//!
//! Neither is a production solver: `exact_exhaustive` walks every subset and
//! `exact_mitm` enumerates two half-instances and joins them through a
//! weight-sorted, profit-pruned table. Two independent routes exist so the
//! oracle itself can be cross-checked.

use crate::error::{Error, Result};
use crate::instance::{Instance, Item, Selection};

/// Hard size cap for full enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 25;
/// Hard size cap for meet-in-the-middle enumeration.
pub const MITM_LIMIT: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactMethod {
    Exhaustive,
    MeetInTheMiddle,
}

impl ExactMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ExactMethod::Exhaustive => "exhaustive",
            ExactMethod::MeetInTheMiddle => "meet-in-the-middle",
        }
    }
}

/// Optimal profit plus one subset achieving it.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactResult {
    pub optimum: f64,
    pub selection: Selection,
    pub method: ExactMethod,
}

/// Full enumeration of all 2^n subsets, n <= 25.
///
/// Subsets are scanned in a fixed depth-first order with strict-improvement
/// replacement, so ties keep the first subset found and the result is
/// deterministic. Branches whose fixed items already exceed the capacity
/// are pruned; that removes only infeasible subsets.
pub fn exact_exhaustive(inst: &Instance) -> Result<ExactResult> {
    let n = inst.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::InstanceTooLarge {
            solver: "exact_exhaustive",
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }

    struct Search<'a> {
        items: &'a [Item],
        capacity: f64,
        best_profit: f64,
        best_mask: u32,
    }

    impl Search<'_> {
        fn walk(&mut self, depth: usize, mask: u32, profit: f64, weight: f64) {
            if depth == self.items.len() {
                if profit > self.best_profit {
                    self.best_profit = profit;
                    self.best_mask = mask;
                }
                return;
            }
            // exclude first, include second
            self.walk(depth + 1, mask, profit, weight);
            let item = &self.items[depth];
            let with = weight + item.weight;
            if with <= self.capacity {
                self.walk(depth + 1, mask | (1 << depth), profit + item.profit, with);
            }
        }
    }

    let mut search = Search {
        items: inst.items(),
        capacity: inst.capacity(),
        best_profit: 0.0,
        best_mask: 0,
    };
    search.walk(0, 0, 0.0, 0.0);

    Ok(ExactResult {
        optimum: search.best_profit,
        selection: selection_from_mask(inst, search.best_mask as u64, 0),
        method: ExactMethod::Exhaustive,
    })
}

/// Split-half enumeration for n <= 40.
///
/// The right half is sorted by weight and pruned to its profit envelope
/// (entries dominated by a lighter-or-equal, at-least-as-profitable entry
/// are dropped); each left subset then pairs with the best right entry that
/// still fits, found by binary search.
pub fn exact_mitm(inst: &Instance) -> Result<ExactResult> {
    let n = inst.len();
    if n > MITM_LIMIT {
        return Err(Error::InstanceTooLarge {
            solver: "exact_mitm",
            n,
            limit: MITM_LIMIT,
        });
    }

    let half = n / 2;
    let capacity = inst.capacity();
    let left = enumerate_half(&inst.items()[..half], capacity);
    let right = enumerate_half(&inst.items()[half..], capacity);

    // Profit envelope of the right half: weight-ascending, strictly
    // profit-increasing. Sort key includes the mask so equal (weight,
    // profit) entries resolve deterministically.
    let mut right = right;
    right.sort_unstable_by(|a, b| {
        a.weight
            .total_cmp(&b.weight)
            .then(b.profit.total_cmp(&a.profit))
            .then(a.mask.cmp(&b.mask))
    });
    let mut envelope: Vec<HalfSubset> = Vec::with_capacity(right.len());
    for entry in right {
        if envelope.last().is_none_or(|best| entry.profit > best.profit) {
            envelope.push(entry);
        }
    }

    let mut best_profit = 0.0f64;
    let mut best_left = 0u64;
    let mut best_right = 0u64;
    for ls in &left {
        let budget = capacity - ls.weight;
        // rightmost envelope entry with weight <= budget
        let end = envelope.partition_point(|e| e.weight <= budget);
        if end == 0 {
            if ls.profit > best_profit {
                best_profit = ls.profit;
                best_left = ls.mask;
                best_right = 0;
            }
            continue;
        }
        let candidate = ls.profit + envelope[end - 1].profit;
        if candidate > best_profit {
            best_profit = candidate;
            best_left = ls.mask;
            best_right = envelope[end - 1].mask;
        }
    }

    let selection = {
        let mut chosen: Vec<u32> = Vec::new();
        collect_mask(&mut chosen, best_left, 0);
        collect_mask(&mut chosen, best_right, half);
        Selection::from_indices(inst, chosen)
    };

    Ok(ExactResult {
        optimum: best_profit,
        selection,
        method: ExactMethod::MeetInTheMiddle,
    })
}

/// Picks the oracle by instance size: full enumeration up to
/// [`EXHAUSTIVE_LIMIT`], meet-in-the-middle up to [`MITM_LIMIT`], refusal
/// beyond that.
pub fn exact_auto(inst: &Instance) -> Result<ExactResult> {
    let n = inst.len();
    if n <= EXHAUSTIVE_LIMIT {
        exact_exhaustive(inst)
    } else if n <= MITM_LIMIT {
        exact_mitm(inst)
    } else {
        Err(Error::InstanceTooLarge {
            solver: "exact",
            n,
            limit: MITM_LIMIT,
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct HalfSubset {
    mask: u64,
    profit: f64,
    weight: f64,
}

/// All feasible subsets of one half, with profit/weight sums built by
/// stripping the lowest set bit (error stays bounded by the subset size).
fn enumerate_half(items: &[Item], capacity: f64) -> Vec<HalfSubset> {
    let h = items.len();
    let size = 1usize << h;
    let mut profit = vec![0.0f64; size];
    let mut weight = vec![0.0f64; size];
    let mut out = Vec::with_capacity(size);
    out.push(HalfSubset {
        mask: 0,
        profit: 0.0,
        weight: 0.0,
    });
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        profit[mask] = profit[rest] + items[low].profit;
        weight[mask] = weight[rest] + items[low].weight;
        if weight[mask] <= capacity {
            out.push(HalfSubset {
                mask: mask as u64,
                profit: profit[mask],
                weight: weight[mask],
            });
        }
    }
    out
}

fn selection_from_mask(inst: &Instance, mask: u64, offset: usize) -> Selection {
    let mut chosen = Vec::new();
    collect_mask(&mut chosen, mask, offset);
    Selection::from_indices(inst, chosen)
}

fn collect_mask(chosen: &mut Vec<u32>, mask: u64, offset: usize) {
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros() as usize;
        chosen.push((offset + bit + 1) as u32);
        m &= m - 1;
    }
}
