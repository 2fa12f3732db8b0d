use serde::{Deserialize, Serialize};

use crate::graph::{stage_of, EvolvingGraph, StagePartition};
use crate::stats;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEscape {
    pub stage: usize,
    /// Slots issued by stage members that land inside the same stage.
    pub same_stage: u64,
    /// All slots issued by stage members.
    pub issued: u64,
}

impl StageEscape {
    /// `None` when the stage issued no slots.
    pub fn fraction(&self) -> Option<f64> {
        (self.issued > 0).then(|| self.same_stage as f64 / self.issued as f64)
    }

    /// One-sided normal slack around `p0` at the given confidence.
    pub fn slack(&self, p0: f64, confidence: f64) -> f64 {
        let z = stats::z_for(2.0 * confidence - 1.0);
        z * (p0 * (1.0 - p0) / self.issued as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagingStats {
    pub stages: Vec<StageEscape>,
}

impl StagingStats {
    /// Adds another graph's counts (same partition) to these.
    pub fn merge(&mut self, other: &StagingStats) {
        if other.stages.len() > self.stages.len() {
            let start = self.stages.len();
            self.stages.extend(other.stages[start..].iter().map(|s| StageEscape { stage: s.stage, ..Default::default() }));
        }
        for (mine, theirs) in self.stages.iter_mut().zip(&other.stages) {
            mine.same_stage += theirs.same_stage;
            mine.issued += theirs.issued;
        }
    }
}

/// Per stage, the fraction of slots `(u, v, j)` with `v` in the stage that
/// also have `u` in the stage.
pub fn staging_escape_stats(g: &EvolvingGraph, partition: &StagePartition) -> StagingStats {
    let mut stages: Vec<StageEscape> =
        (0..partition.len()).map(|stage| StageEscape { stage, ..Default::default() }).collect();
    for v in g.first_arrival()..=g.n() {
        let sv = stage_of(v);
        for &u in g.out_targets(v) {
            stages[sv].issued += 1;
            if stage_of(u as usize) == sv {
                stages[sv].same_stage += 1;
            }
        }
    }
    StagingStats { stages }
}
