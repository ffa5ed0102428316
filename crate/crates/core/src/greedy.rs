//! Ratio-order greedy fill with first-reject bookkeeping.
//!
//! Beyond the familiar greedy pass, this computes two quantities at the
//! moment the first object is rejected: `Pmax`, an upper bound on the profit
//! of any feasible subset (the fractional-relaxation bound at that point),
//! and `Gefr`, greedy's maximum fractional error at first reject. `Pmax`
//! certifies the error of any solver's result on the same instance.

use crate::error::Result;
use crate::instance::{Instance, Item, Selection, Validation};

/// Profit and weight sums captured at the moment of the first reject.
///
/// The greedy loop keeps adding lighter objects after the first reject, so
/// the final sums differ from this snapshot; the bound arithmetic needs the
/// snapshot, post-reject statistics need both.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RejectSnapshot {
    pub profit: f64,
    pub weight: f64,
}

/// Result of a greedy pass: the final selection plus the bound data.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyReport {
    /// Every object (in ratio order) whose addition kept the weight within
    /// capacity — including objects after the first reject.
    pub selection: Selection,
    /// 1-based original index of the first rejected object, if any.
    pub first_reject: Option<u32>,
    /// Sums at the first reject; `None` when everything fit.
    pub at_reject: Option<RejectSnapshot>,
    /// Maximum possible profit sum for this instance.
    pub pmax: f64,
    /// Greedy's maximum fractional error at first reject, in [0, 1].
    pub gefr: f64,
}

impl GreedyReport {
    /// Final greedy profit sum.
    pub fn profit(&self) -> f64 {
        self.selection.profit_sum
    }

    /// Final greedy weight sum.
    pub fn weight(&self) -> f64 {
        self.selection.weight_sum
    }

    /// Certified maximum fractional error of the greedy result itself.
    pub fn certified_error(&self) -> f64 {
        certified_error(self.pmax, self.profit())
    }
}

/// Greedy fill in the given ratio order.
///
/// `order` must be the nonincreasing-ratio permutation from
/// [`crate::instance::sort_by_ratio`]; both this pass and the dynamic
/// program share that single sort. All `n` objects are visited: a reject
/// does not stop the loop, it only (on the first occurrence) anchors the
/// `Pmax` and `Gefr` computation.
pub fn greedy_plus(inst: &Instance, order: &[u32]) -> GreedyReport {
    debug_assert_eq!(order.len(), inst.len());
    let (report, _) = greedy_core(inst.items(), inst.capacity(), order, true);
    report
}

/// Number of objects the greedy pass selects, without building the report.
/// Used by the fixed-k capacity search, which probes many capacities.
pub(crate) fn greedy_selection_count(items: &[Item], capacity: f64, order: &[u32]) -> usize {
    let (_, count) = greedy_core(items, capacity, order, false);
    count
}

fn greedy_core(
    items: &[Item],
    capacity: f64,
    order: &[u32],
    build_report: bool,
) -> (GreedyReport, usize) {
    let mut profit = 0.0;
    let mut weight = 0.0;
    let mut count = 0usize;
    let mut chosen = Vec::new();
    let mut first_reject = None;
    let mut at_reject = None;
    let mut pmax = 0.0;
    let mut gefr = 0.0;

    for &idx in order {
        let item = &items[idx as usize - 1];
        if weight + item.weight <= capacity {
            profit += item.profit;
            weight += item.weight;
            count += 1;
            if build_report {
                chosen.push(idx);
            }
        } else if first_reject.is_none() {
            first_reject = Some(idx);
            at_reject = Some(RejectSnapshot { profit, weight });
            let headroom = (capacity - weight) * item.ratio();
            pmax = profit + headroom;
            gefr = if pmax > 0.0 { headroom / pmax } else { 0.0 };
        }
    }

    if first_reject.is_none() {
        // all n objects fit
        pmax = profit;
        gefr = 0.0;
    }

    let report = GreedyReport {
        selection: if build_report {
            let mut chosen = chosen;
            chosen.sort_unstable();
            Selection {
                chosen,
                profit_sum: profit,
                weight_sum: weight,
            }
        } else {
            Selection::empty()
        },
        first_reject,
        at_reject,
        pmax,
        gefr,
    };
    (report, count)
}

/// Certified maximum fractional error `(pmax - s) / pmax` for a solver that
/// achieved profit `s` on an instance with bound `pmax`.
///
/// `pmax` can only be zero when every profit is zero; the error is then
/// defined as 0.
pub fn certified_error(pmax: f64, s: f64) -> f64 {
    if pmax <= 0.0 {
        0.0
    } else {
        (pmax - s) / pmax
    }
}

/// Re-validates a greedy report against its instance.
pub fn validate_report(inst: &Instance, report: &GreedyReport) -> Result<Validation> {
    crate::instance::validate_selection(inst, &report.selection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::sort_by_ratio;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(pairs: &[(f64, f64)], c: f64) -> Instance {
        Instance::from_pairs(pairs, c).unwrap()
    }

    #[test]
    fn reject_bookkeeping_hand_example() {
        // Processing order [1, 2]: item 1 (w=0.6) fits, item 2 (w=0.5) is
        // rejected at W=0.6, so Pmax = 1 + 0.4 * (1/0.5) = 1.8.
        let i = inst(&[(1.0, 0.6), (1.0, 0.5)], 1.0);
        let report = greedy_plus(&i, &[1, 2]);
        assert_eq!(report.first_reject, Some(2));
        let snap = report.at_reject.unwrap();
        assert_eq!(snap.profit, 1.0);
        assert_eq!(snap.weight, 0.6);
        assert!((report.pmax - 1.8).abs() < 1e-12);
        assert!((report.gefr - 0.8 / 1.8).abs() < 1e-12);
        assert_eq!(report.profit(), 1.0);
    }

    #[test]
    fn everything_fits() {
        let i = inst(&[(1.0, 0.2), (1.0, 0.3)], 1.0);
        let order = sort_by_ratio(&i);
        let report = greedy_plus(&i, &order);
        assert_eq!(report.first_reject, None);
        assert_eq!(report.profit(), 2.0);
        assert_eq!(report.pmax, 2.0);
        assert_eq!(report.gefr, 0.0);
        assert_eq!(report.selection.size(), 2);
    }

    #[test]
    fn capacity_below_every_weight() {
        let i = inst(&[(3.0, 2.0), (1.0, 1.5)], 1.0);
        let order = sort_by_ratio(&i);
        let report = greedy_plus(&i, &order);
        assert_eq!(report.selection.size(), 0);
        assert_eq!(report.first_reject, Some(1)); // best ratio first
        // Pmax = c * p_r / w_r = 1.0 * 3/2
        assert!((report.pmax - 1.5).abs() < 1e-12);
    }

    #[test]
    fn continues_past_first_reject() {
        // Ratio order is [1, 2, 3]; item 2 is rejected but the lighter
        // item 3 still fits afterwards.
        let i = inst(&[(2.0, 0.6), (1.5, 0.5), (0.4, 0.2)], 1.0);
        let order = sort_by_ratio(&i);
        assert_eq!(order, vec![1, 2, 3]);
        let report = greedy_plus(&i, &order);
        assert_eq!(report.first_reject, Some(2));
        assert_eq!(report.selection.chosen, vec![1, 3]);
        assert!((report.profit() - 2.4).abs() < 1e-12);
        // bound anchored at the first reject, not at the final sums
        assert!((report.pmax - (2.0 + 0.4 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn certified_error_cases() {
        assert_eq!(certified_error(1.8, 1.8), 0.0);
        assert!((certified_error(1.8, 1.0) - 0.8 / 1.8).abs() < 1e-15);
        assert!((certified_error(2.0, 1.9) - 0.05).abs() < 1e-15);
        assert_eq!(certified_error(0.0, 0.0), 0.0); // all-zero-profit case
    }

    #[test]
    fn zero_profit_instance_has_zero_bound() {
        let i = inst(&[(0.0, 2.0), (0.0, 3.0)], 1.0);
        let order = sort_by_ratio(&i);
        let report = greedy_plus(&i, &order);
        assert_eq!(report.pmax, 0.0);
        assert_eq!(report.gefr, 0.0);
    }

    #[test]
    fn pmax_dominates_exhaustive_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
        for _ in 0..1000 {
            let n = rng.gen_range(2..=20);
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.01..1.0)))
                .collect();
            let total: f64 = pairs.iter().map(|p| p.1).sum();
            let c = rng.gen_range(0.01..total);
            let i = inst(&pairs, c);
            let order = sort_by_ratio(&i);
            let report = greedy_plus(&i, &order);

            let exact = oracle::exact_exhaustive(&i).unwrap();
            assert!(
                exact.optimum <= report.pmax * (1.0 + 1e-12),
                "optimum {} exceeded pmax {}",
                exact.optimum,
                report.pmax
            );
            assert!(report.weight() <= c);
            assert!((0.0..=1.0).contains(&report.gefr));
            let v = validate_report(&i, &report).unwrap();
            assert!(v.feasible && v.sums_consistent);
        }
    }
}
