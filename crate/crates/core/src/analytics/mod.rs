//! Degree-count recurrences for the preferential-attachment family and the
//! estimators used to check them against generated graphs.

mod bootstrap;
mod degree;
mod eta;
mod fit;
mod staging;

use std::collections::BTreeMap;

use crate::graph::EvolvingGraph;

pub use bootstrap::{expected_round1_infections, Round1Bound};
pub use degree::{expected_degree, expected_degree_with, DegreeNormalization, ExpectedDegreeTable};
pub use eta::{solve_eta, solve_eta_with_source, MasterEquationTable, SourceDegree, ETA_FLOOR};
pub use fit::{fit_power_law, PowerLawFit};
pub use staging::{staging_escape_stats, StageEscape, StagingStats};

/// Number of nodes of each degree (degrees counted with multiplicity).
pub fn degree_histogram(g: &EvolvingGraph) -> BTreeMap<usize, u64> {
    let mut hist = BTreeMap::new();
    for &d in &g.degrees()[1..] {
        *hist.entry(d as usize).or_insert(0) += 1;
    }
    hist
}
