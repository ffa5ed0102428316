//! Approximate 0/1 knapsack solving with a certified error bound.
//!
//! The solver runs a dynamic program over `T = g·ln(n)` weight bins indexed
//! by exact subset weight, preceded by one profit/weight-ratio sort shared
//! with a greedy pass. The greedy pass yields `Pmax`, an instance-specific
//! upper bound on any feasible profit, so every returned solution carries a
//! certified maximum fractional error `e = (Pmax - S)/Pmax`. Exact oracles
//! (full and meet-in-the-middle enumeration) exist purely to validate the
//! bound and the certificates on small instances.
//!
//! The crate also ships the trial machinery used for benchmark
//! reproduction: seeded random and fixed-k instance generation, a reader
//! for published hard benchmark files with recorded optima, and a harness
//! that aggregates batched trials into report tables.

pub mod error;
pub mod greedy;
pub mod harness;
pub mod instance;
pub mod instgen;
pub mod jooken;
pub mod oracle;
pub mod xdp;

pub use error::{Error, Result};
pub use instance::{sort_by_ratio, validate_selection, Instance, Item, Selection};
