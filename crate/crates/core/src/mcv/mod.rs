//! Layered monotone circuits and their reduction to k-complex contagion.
//!
//! Every gate becomes `k` vertices, every wire `k^2` vertices, and a pad of
//! `M` vertices hangs off the output gate. Seeding the vertices of the
//! constant-one gates infects the pad (and then everything) exactly when the
//! circuit evaluates to 1; otherwise at most `R = 3 k^2 |gates|` vertices are
//! ever infected.

mod circuit;
mod reduction;

pub use circuit::{evaluate_circuit, parse_circuit, random_circuit, Circuit, Gate, GateKind, Wire};
pub use reduction::{
    build, check, minimum_threshold, gap_threshold, verify_timing, ReductionInstance, Threshold, Verdict,
    VertexClass,
};
