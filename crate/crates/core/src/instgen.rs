//! Seeded random-trial instance generation.
//!
//! Profits and weights are drawn independently and uniformly from the open
//! interval (0, 1). The capacity is either a uniform draw from
//! [min weight, 0.9 · total weight] ("random fraction") or calibrated by
//! bisection until the greedy pass selects a requested number of objects
//! ("fixed k").
//!
//! # Reproducibility
//!
//! The generator is ChaCha8 seeded through [`derive_seed`], a splitmix64
//! hash of (master seed, stream index). Every trial in a batch derives its
//! own seed, so trials are independent of scheduling order and a
//! (seed, config) pair always produces the identical instance.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::greedy::greedy_selection_count;
use crate::instance::{sort_by_ratio, Instance, Item};

/// Generator identity used for every random draw in this crate.
pub type TrialRng = ChaCha8Rng;

/// Default relative tolerance on the achieved greedy selection size.
pub const DEFAULT_K_TOLERANCE: f64 = 0.01;

/// Capacity fraction cap: c never exceeds 90% of the total weight.
pub const CAPACITY_FRACTION_CAP: f64 = 0.9;

const MAX_BISECTION_ITERS: usize = 200;
const MAX_CALIBRATION_ATTEMPTS: usize = 50;

/// splitmix64 finalizer over a golden-ratio indexed stream.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and an index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CapacityRule {
    /// c uniform in [min weight, 0.9 · total weight].
    RandomFraction,
    /// c bisected until greedy selects `target` objects, within tolerance.
    FixedK { target: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialConfig {
    pub n: usize,
    pub seed: u64,
    pub rule: CapacityRule,
    /// Relative tolerance on the achieved greedy size, with an absolute
    /// floor of one object.
    pub k_tolerance: f64,
}

impl TrialConfig {
    pub fn random(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            rule: CapacityRule::RandomFraction,
            k_tolerance: DEFAULT_K_TOLERANCE,
        }
    }

    pub fn fixed_k(n: usize, seed: u64, target: usize) -> Self {
        Self {
            n,
            seed,
            rule: CapacityRule::FixedK { target },
            k_tolerance: DEFAULT_K_TOLERANCE,
        }
    }

    fn tolerance_count(&self, target: usize) -> usize {
        ((self.k_tolerance * target as f64).round() as usize).max(1)
    }
}

/// Generates per the configured capacity rule.
pub fn gen_trial(cfg: &TrialConfig) -> Result<Instance> {
    match cfg.rule {
        CapacityRule::RandomFraction => Ok(gen_random_trial(cfg)),
        CapacityRule::FixedK { .. } => gen_fixed_k_trial(cfg),
    }
}

/// Random-fraction trial: uniform items, uniform capacity.
pub fn gen_random_trial(cfg: &TrialConfig) -> Instance {
    assert!(cfg.n >= 1, "trial instances need at least one item");
    let mut rng = TrialRng::seed_from_u64(cfg.seed);
    let items = draw_items(&mut rng, cfg.n);
    let lo = items.iter().map(|it| it.weight).fold(f64::INFINITY, f64::min);
    let hi = CAPACITY_FRACTION_CAP * items.iter().map(|it| it.weight).sum::<f64>();
    let capacity = if hi <= lo {
        lo // single-item instances: the interval collapses
    } else {
        let u: f64 = rng.gen();
        lo + u * (hi - lo)
    };
    Instance::new(items, capacity).expect("drawn values satisfy the instance invariants")
}

/// Fixed-k trial: items drawn once, then the capacity bisected in
/// [min weight, total weight] until greedy selects `target` objects within
/// `max(1, round(k_tolerance · target))`.
///
/// A draw whose bisection cannot hit the window is abandoned and retried
/// with the next derived seed, up to 50 attempts.
pub fn gen_fixed_k_trial(cfg: &TrialConfig) -> Result<Instance> {
    let target = match cfg.rule {
        CapacityRule::FixedK { target } => target,
        CapacityRule::RandomFraction => {
            panic!("gen_fixed_k_trial requires a FixedK capacity rule")
        }
    };
    assert!(cfg.n >= 1, "trial instances need at least one item");
    assert!(
        (1..=cfg.n).contains(&target),
        "fixed-k target must be in 1..=n"
    );
    let tolerance = cfg.tolerance_count(target);

    for attempt in 0..MAX_CALIBRATION_ATTEMPTS {
        let seed = if attempt == 0 {
            cfg.seed
        } else {
            derive_seed(cfg.seed, attempt as u64)
        };
        let mut rng = TrialRng::seed_from_u64(seed);
        let items = draw_items(&mut rng, cfg.n);
        // the sort does not depend on c, so one sort serves every probe
        let probe = Instance::new(items.clone(), 1.0).expect("valid draw");
        let order = sort_by_ratio(&probe);

        let mut lo = items.iter().map(|it| it.weight).fold(f64::INFINITY, f64::min);
        let mut hi: f64 = items.iter().map(|it| it.weight).sum();
        for _ in 0..MAX_BISECTION_ITERS {
            let mid = 0.5 * (lo + hi);
            let count = greedy_selection_count(&items, mid, &order);
            if count.abs_diff(target) <= tolerance {
                return Instance::new(items, mid);
            }
            if count < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    Err(Error::CalibrationFailed {
        n: cfg.n,
        target,
        attempts: MAX_CALIBRATION_ATTEMPTS,
    })
}

fn draw_items(rng: &mut TrialRng, n: usize) -> Vec<Item> {
    (0..n)
        .map(|_| Item {
            profit: rng.sample(Open01),
            weight: rng.sample(Open01),
        })
        .collect()
}
