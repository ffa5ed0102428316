//! Problem and solution data model shared by every solver in this crate.
//!
//! Item indices are 1-based throughout the solver code and file formats;
//! index 0 is reserved as the "start of subset" sentinel used by the
//! dynamic program's backtracking tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when checking stored sums against recomputed ones.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// One object: a nonnegative profit and a strictly positive weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Item {
    pub profit: f64,
    pub weight: f64,
}

impl Item {
    pub fn ratio(&self) -> f64 {
        self.profit / self.weight
    }
}

/// A 0/1 knapsack instance: an ordered multiset of items plus a capacity.
///
/// Duplicate (profit, weight) pairs are allowed; selections are index based,
/// so duplicates only make optimal subsets non-unique, never ambiguous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    items: Vec<Item>,
    capacity: f64,
}

impl Instance {
    /// Validates the type invariants: n >= 1, finite positive weights,
    /// finite nonnegative profits, finite positive capacity. The capacity
    /// may be below every weight; solvers then return the empty solution.
    pub fn new(items: Vec<Item>, capacity: f64) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyInstance);
        }
        for (i, item) in items.iter().enumerate() {
            if !(item.weight.is_finite() && item.weight > 0.0) {
                return Err(Error::BadWeight {
                    index: i + 1,
                    weight: item.weight,
                });
            }
            if !(item.profit.is_finite() && item.profit >= 0.0) {
                return Err(Error::BadProfit {
                    index: i + 1,
                    profit: item.profit,
                });
            }
        }
        if !(capacity.is_finite() && capacity > 0.0) {
            return Err(Error::BadCapacity { capacity });
        }
        Ok(Self { items, capacity })
    }

    /// Convenience constructor from (profit, weight) pairs.
    pub fn from_pairs(pairs: &[(f64, f64)], capacity: f64) -> Result<Self> {
        let items = pairs
            .iter()
            .map(|&(profit, weight)| Item { profit, weight })
            .collect();
        Self::new(items, capacity)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Item by 1-based index. Panics on 0 or out of range.
    pub fn item(&self, index: usize) -> &Item {
        &self.items[index - 1]
    }

    pub fn total_weight(&self) -> f64 {
        self.items.iter().map(|it| it.weight).sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.items
            .iter()
            .map(|it| it.weight)
            .fold(f64::INFINITY, f64::min)
    }
}

/// JSON interchange shape: {"capacity": c, "items": [[profit, weight], ...]}.
#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    capacity: f64,
    items: Vec<(f64, f64)>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;

    fn try_from(repr: InstanceRepr) -> Result<Self> {
        Instance::from_pairs(&repr.items, repr.capacity)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(inst: Instance) -> Self {
        InstanceRepr {
            capacity: inst.capacity,
            items: inst.items.iter().map(|it| (it.profit, it.weight)).collect(),
        }
    }
}

/// A chosen subset with its profit and weight sums.
///
/// `chosen` holds 1-based item indices in ascending order. The sums are
/// computed from the item data at construction, so they satisfy the
/// consistency invariant by definition.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub chosen: Vec<u32>,
    pub profit_sum: f64,
    pub weight_sum: f64,
}

impl Selection {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a selection from 1-based indices, summing profits and weights
    /// in ascending index order.
    pub fn from_indices(inst: &Instance, mut chosen: Vec<u32>) -> Self {
        chosen.sort_unstable();
        let mut profit_sum = 0.0;
        let mut weight_sum = 0.0;
        for &idx in &chosen {
            let item = inst.item(idx as usize);
            profit_sum += item.profit;
            weight_sum += item.weight;
        }
        Self {
            chosen,
            profit_sum,
            weight_sum,
        }
    }

    pub fn size(&self) -> usize {
        self.chosen.len()
    }
}

/// Outcome of re-checking a selection against its instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validation {
    /// Recomputed weight fits the capacity.
    pub feasible: bool,
    /// Profit sum recomputed from the item data.
    pub profit: f64,
    /// Weight sum recomputed from the item data.
    pub weight: f64,
    /// Stored sums agree with the recomputed ones within [`SUM_TOLERANCE`].
    pub sums_consistent: bool,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Recomputes a selection's sums from scratch and checks feasibility.
///
/// Structural problems (out-of-range or duplicate indices) are errors;
/// infeasibility and sum drift are reported in the result instead.
pub fn validate_selection(inst: &Instance, sel: &Selection) -> Result<Validation> {
    let n = inst.len();
    let mut seen = vec![false; n + 1];
    let mut profit = 0.0;
    let mut weight = 0.0;
    for &idx in &sel.chosen {
        let idx = idx as usize;
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
        if seen[idx] {
            return Err(Error::DuplicateIndex { index: idx });
        }
        seen[idx] = true;
        let item = inst.item(idx);
        profit += item.profit;
        weight += item.weight;
    }
    Ok(Validation {
        feasible: weight <= inst.capacity(),
        profit,
        weight,
        sums_consistent: rel_close(profit, sel.profit_sum, SUM_TOLERANCE)
            && rel_close(weight, sel.weight_sum, SUM_TOLERANCE),
    })
}

/// Returns the 1-based item indices ordered by profit/weight ratio, high to
/// low. Equal ratios keep their original relative order, so the permutation
/// is deterministic for a given instance.
pub fn sort_by_ratio(inst: &Instance) -> Vec<u32> {
    let mut keyed: Vec<(u32, f64)> = inst
        .items()
        .iter()
        .enumerate()
        .map(|(i, item)| (i as u32 + 1, item.ratio()))
        .collect();
    // stable sort; comparator reversed for high-to-low
    keyed.sort_by(|a, b| b.1.total_cmp(&a.1));
    keyed.into_iter().map(|(idx, _)| idx).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(pairs: &[(f64, f64)], c: f64) -> Instance {
        Instance::from_pairs(pairs, c).unwrap()
    }

    #[test]
    fn construction_rejects_bad_values() {
        assert!(matches!(
            Instance::from_pairs(&[], 1.0),
            Err(Error::EmptyInstance)
        ));
        assert!(matches!(
            Instance::from_pairs(&[(1.0, 0.0)], 1.0),
            Err(Error::BadWeight { index: 1, .. })
        ));
        assert!(matches!(
            Instance::from_pairs(&[(1.0, -2.0)], 1.0),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            Instance::from_pairs(&[(-0.5, 1.0)], 1.0),
            Err(Error::BadProfit { index: 1, .. })
        ));
        assert!(matches!(
            Instance::from_pairs(&[(f64::NAN, 1.0)], 1.0),
            Err(Error::BadProfit { .. })
        ));
        assert!(matches!(
            Instance::from_pairs(&[(1.0, 1.0)], 0.0),
            Err(Error::BadCapacity { .. })
        ));
        assert!(matches!(
            Instance::from_pairs(&[(1.0, 1.0)], f64::INFINITY),
            Err(Error::BadCapacity { .. })
        ));
    }

    #[test]
    fn validate_empty_selection_is_feasible() {
        let i = inst(&[(1.0, 0.6), (1.0, 0.5)], 1.0);
        let v = validate_selection(&i, &Selection::empty()).unwrap();
        assert!(v.feasible);
        assert_eq!(v.profit, 0.0);
        assert_eq!(v.weight, 0.0);
        assert!(v.sums_consistent);
    }

    #[test]
    fn validate_detects_overweight() {
        let i = inst(&[(1.0, 0.6), (1.0, 0.5)], 1.0);
        let sel = Selection::from_indices(&i, vec![1, 2]);
        let v = validate_selection(&i, &sel).unwrap();
        assert!(!v.feasible);
        assert!((v.weight - 1.1).abs() < 1e-15);
    }

    #[test]
    fn validate_single_item() {
        let i = inst(&[(1.0, 0.6), (1.0, 0.5)], 1.0);
        let sel = Selection::from_indices(&i, vec![1]);
        let v = validate_selection(&i, &sel).unwrap();
        assert!(v.feasible);
        assert_eq!(v.profit, 1.0);
        assert_eq!(v.weight, 0.6);
    }

    #[test]
    fn validate_rejects_structural_errors() {
        let i = inst(&[(1.0, 0.6), (1.0, 0.5)], 1.0);
        let out_of_range = Selection {
            chosen: vec![3],
            profit_sum: 0.0,
            weight_sum: 0.0,
        };
        assert!(matches!(
            validate_selection(&i, &out_of_range),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        ));
        let duplicate = Selection {
            chosen: vec![1, 1],
            profit_sum: 2.0,
            weight_sum: 1.2,
        };
        assert!(matches!(
            validate_selection(&i, &duplicate),
            Err(Error::DuplicateIndex { index: 1 })
        ));
    }

    #[test]
    fn validate_reports_sum_drift() {
        let i = inst(&[(1.0, 0.6)], 1.0);
        let sel = Selection {
            chosen: vec![1],
            profit_sum: 1.5, // deliberately wrong
            weight_sum: 0.6,
        };
        let v = validate_selection(&i, &sel).unwrap();
        assert!(v.feasible);
        assert!(!v.sums_consistent);
    }

    #[test]
    fn ratio_sort_basic() {
        let i = inst(&[(2.0, 1.0), (3.0, 1.0), (1.0, 1.0)], 1.0);
        assert_eq!(sort_by_ratio(&i), vec![2, 1, 3]);
    }

    #[test]
    fn ratio_sort_ties_keep_original_order() {
        let i = inst(&[(1.0, 1.0), (2.0, 2.0)], 1.0);
        assert_eq!(sort_by_ratio(&i), vec![1, 2]);
    }

    #[test]
    fn json_shape_matches_interchange_format() {
        let i = inst(&[(1.0, 0.5), (2.0, 0.25)], 1.5);
        let json = serde_json::to_string(&i).unwrap();
        assert_eq!(json, r#"{"capacity":1.5,"items":[[1.0,0.5],[2.0,0.25]]}"#);
        let back: Instance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, i);
    }

    #[test]
    fn json_rejects_invalid_instances() {
        let bad = r#"{"capacity":1.0,"items":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<Instance>(bad).is_err());
    }

    proptest! {
        #[test]
        fn ratio_sort_is_a_nonincreasing_permutation(
            pairs in proptest::collection::vec((1e-6f64..1e3, 1e-6f64..1e3), 1..1000)
        ) {
            let i = inst(&pairs, 1.0);
            let order = sort_by_ratio(&i);

            let mut seen = vec![false; i.len() + 1];
            for &idx in &order {
                prop_assert!(idx >= 1 && idx as usize <= i.len());
                prop_assert!(!seen[idx as usize]);
                seen[idx as usize] = true;
            }
            for w in order.windows(2) {
                let ra = i.item(w[0] as usize).ratio();
                let rb = i.item(w[1] as usize).ratio();
                prop_assert!(ra >= rb);
            }
            // deterministic
            prop_assert_eq!(sort_by_ratio(&i), order);
        }

        #[test]
        fn json_roundtrip_is_bit_exact(
            pairs in proptest::collection::vec(
                (0.0f64..1e12, 1e-12f64..1e12), 1..50),
            capacity in 1e-9f64..1e12,
        ) {
            let i = inst(&pairs, capacity);
            let json = serde_json::to_string(&i).unwrap();
            let back: Instance = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back.capacity().to_bits(), i.capacity().to_bits());
            for (a, b) in back.items().iter().zip(i.items()) {
                prop_assert_eq!(a.profit.to_bits(), b.profit.to_bits());
                prop_assert_eq!(a.weight.to_bits(), b.weight.to_bits());
            }
        }
    }
}
