use serde::{Deserialize, Serialize};

use super::{sweep, RunRecord, RunnerOutput, Settings};
use crate::analytics::{staging_escape_stats, StagingStats};
use crate::error::{Error, Result};
use crate::graph::{generate_with, GenConfig, Model, StagePartition};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagingConfig {
    #[serde(default = "default_model")]
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    /// Null value for the same-stage fraction.
    #[serde(default = "default_p0")]
    pub p0: f64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    /// Stages below this one are reported but not checked.
    #[serde(default = "default_min_stage")]
    pub min_stage: usize,
}

fn default_model() -> Model {
    Model::PaIndependent
}

fn default_p0() -> f64 {
    1.0 / 3.0
}

fn default_confidence() -> f64 {
    0.99
}

fn default_min_stage() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageCheck {
    pub stage: usize,
    pub same_stage: u64,
    pub issued: u64,
    pub fraction: f64,
    /// `p0 + slack`.
    pub limit: f64,
    pub checked: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagingSummary {
    pub n: usize,
    pub graphs: usize,
    pub p0: f64,
    pub confidence: f64,
    pub stages: Vec<StageCheck>,
}

impl StagingSummary {
    pub fn all_pass(&self) -> bool {
        self.stages.iter().all(|s| s.pass)
    }
}

/// Pools per-stage same-stage slot counts over many graphs.
pub fn run_staging(cfg: &StagingConfig, settings: &Settings) -> Result<RunnerOutput<StagingSummary>> {
    GenConfig::new(cfg.model, cfg.n, cfg.m, cfg.p, 0).validate()?;
    if !(cfg.confidence > 0.5 && cfg.confidence < 1.0) {
        return Err(Error::Config(format!("confidence must lie in (0.5, 1), got {}", cfg.confidence)));
    }
    let partition = StagePartition::new(cfg.n);
    let swept = sweep(settings, 1, |_, _, rng| {
        let g = generate_with(&GenConfig::new(cfg.model, cfg.n, cfg.m, cfg.p, 0), rng)?;
        Ok(staging_escape_stats(&g, &partition))
    })?;
    let records = swept
        .tasks
        .iter()
        .map(|t| RunRecord { model: Some(cfg.model), n: Some(cfg.n), m: Some(cfg.m), p: Some(cfg.p), ..t.record() })
        .collect();

    let mut pooled = StagingStats { stages: Vec::new() };
    for t in &swept.tasks {
        pooled.merge(&t.value);
    }
    let stages = pooled
        .stages
        .iter()
        .filter_map(|s| {
            let fraction = s.fraction()?;
            let limit = cfg.p0 + s.slack(cfg.p0, cfg.confidence);
            let checked = s.stage >= cfg.min_stage;
            Some(StageCheck {
                stage: s.stage,
                same_stage: s.same_stage,
                issued: s.issued,
                fraction,
                limit,
                checked,
                pass: !checked || fraction < limit,
            })
        })
        .collect();
    let summary = StagingSummary { n: cfg.n, graphs: swept.tasks.len(), p0: cfg.p0, confidence: cfg.confidence, stages };
    Ok(RunnerOutput::new(&swept, records, summary))
}
