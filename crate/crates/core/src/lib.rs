//! Simulation toolkit for k-complex contagions on time-evolving random graphs.
//!
//! * [`graph`]: preferential-attachment and copy-model generators, slot
//!   orderings and the geometric stage partition.
//! * [`contagion`]: synchronous k-threshold contagion, plus the pruned
//!   directed process that upper-bounds its running time.
//! * [`branching`]: the labelled branching process and its potential.
//! * [`analytics`]: degree-count recurrences, expected degrees, round-one
//!   infection bounds and the empirical estimators that check them.
//! * [`mcv`]: layered monotone circuits and their reduction to contagion.
//! * [`experiments`]: seeded, reproducible sweeps tying everything together.

pub mod analytics;
pub mod branching;
pub mod contagion;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod mcv;
pub mod par;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use par::Execution;
