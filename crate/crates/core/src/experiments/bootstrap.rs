use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{sweep, RunRecord, RunnerOutput, Settings};
use crate::analytics::{expected_round1_infections, Round1Bound};
use crate::contagion::{self, ContagionConfig};
use crate::error::{Error, Result};
use crate::graph::{generate_with, GenConfig, Model};
use crate::stats::{self, MeanEstimate, Proportion};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BootstrapMode {
    /// Stop after the first round.
    Round1Only,
    #[default]
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    #[serde(default = "default_model")]
    pub model: Model,
    pub n: usize,
    pub p: f64,
    pub m: usize,
    pub k: usize,
    pub seed_sizes: Vec<usize>,
    #[serde(default)]
    pub mode: BootstrapMode,
    #[serde(default)]
    pub count_multiplicity: bool,
    /// Also report the fraction of runs fully infected within this many rounds.
    #[serde(default)]
    pub round_budget: Option<usize>,
}

fn default_model() -> Model {
    Model::PaIndependent
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapPoint {
    pub seed_count: usize,
    pub runs: usize,
    /// Runs in which round 1 infected anybody.
    pub spread_in_round1: Proportion,
    pub fully_infected: Proportion,
    pub full_within_budget: Option<Proportion>,
    /// Runs in which node `k` was infected by round 1.
    pub target_by_round1: Proportion,
    /// Runs in which all of nodes `1..=k` were infected by round 1.
    pub oldies_by_round1: Proportion,
    pub rounds: MeanEstimate,
    pub max_rounds: usize,
    pub mean_round1_new: f64,
    /// Analytic bound on the expected round-1 infections (independent PA only).
    pub round1_bound: Option<Round1Bound>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub model: Model,
    pub n: usize,
    pub p: f64,
    pub m: usize,
    pub k: usize,
    pub mode: BootstrapMode,
    pub count_multiplicity: bool,
    pub round_budget: Option<usize>,
    pub points: Vec<BootstrapPoint>,
}

struct Outcome {
    rounds: usize,
    infected: usize,
    full: bool,
    round1_new: usize,
    target_round: Option<usize>,
    oldies: bool,
}

/// Seeds `s` uniformly random nodes (without replacement) of a fresh graph
/// per run and records what round 1, and optionally the full process, does.
pub fn run_bootstrap(cfg: &BootstrapConfig, settings: &Settings) -> Result<RunnerOutput<BootstrapSummary>> {
    GenConfig::new(cfg.model, cfg.n, cfg.m, cfg.p, 0).validate()?;
    if cfg.seed_sizes.is_empty() {
        return Err(Error::Config("seed_sizes must not be empty".into()));
    }
    if cfg.k == 0 || cfg.k > cfg.n {
        return Err(Error::Config(format!("k = {} outside 1..={}", cfg.k, cfg.n)));
    }
    if let Some(&s) = cfg.seed_sizes.iter().find(|&&s| s == 0 || s >= cfg.n) {
        return Err(Error::Config(format!("seed size {s} must lie in 1..{}", cfg.n)));
    }
    let swept = sweep(settings, cfg.seed_sizes.len(), |g, _, rng| {
        let graph = generate_with(&GenConfig::new(cfg.model, cfg.n, cfg.m, cfg.p, 0), rng)?;
        let seeds: Vec<usize> = sample(rng, cfg.n, cfg.seed_sizes[g]).into_iter().map(|i| i + 1).collect();
        let mut c = ContagionConfig::new(cfg.k, seeds).with_multiplicity(cfg.count_multiplicity);
        if cfg.mode == BootstrapMode::Round1Only {
            c = c.with_max_rounds(1);
        }
        let r = contagion::run(&graph.to_multigraph(), &c)?;
        Ok(Outcome {
            rounds: r.rounds_to_fixation,
            infected: r.infected_count,
            full: r.fully_infected,
            round1_new: r.newly_infected(1).len(),
            target_round: r.round(cfg.k),
            oldies: (1..=cfg.k).all(|v| r.round(v).is_some_and(|t| t <= 1)),
        })
    })?;

    let records = swept
        .tasks
        .iter()
        .map(|t| RunRecord {
            model: Some(cfg.model),
            n: Some(cfg.n),
            m: Some(cfg.m),
            p: Some(cfg.p),
            k: Some(cfg.k),
            seed_count: Some(cfg.seed_sizes[t.grid]),
            rounds_to_fixation: Some(t.value.rounds),
            infected_count: Some(t.value.infected),
            fully_infected: Some(t.value.full),
            round1_new: Some(t.value.round1_new),
            target_round: t.value.target_round,
            ..t.record()
        })
        .collect();

    let mut points = Vec::new();
    for (g, &s) in cfg.seed_sizes.iter().enumerate() {
        let runs: Vec<&Outcome> = swept.tasks.iter().filter(|t| t.grid == g).map(|t| &t.value).collect();
        if runs.is_empty() {
            continue;
        }
        let total = runs.len() as u64;
        let count = |f: &dyn Fn(&Outcome) -> bool| stats::wilson(runs.iter().filter(|o| f(o)).count() as u64, total, 0.95);
        let rounds: Vec<f64> = runs.iter().map(|o| o.rounds as f64).collect();
        let round1_bound = (cfg.model == Model::PaIndependent && s >= cfg.k)
            .then(|| expected_round1_infections(cfg.p, cfg.m, cfg.k, s, cfg.n))
            .transpose()?;
        points.push(BootstrapPoint {
            seed_count: s,
            runs: runs.len(),
            spread_in_round1: count(&|o| o.round1_new > 0),
            fully_infected: count(&|o| o.full),
            full_within_budget: cfg.round_budget.map(|b| count(&|o| o.full && o.rounds <= b)),
            target_by_round1: count(&|o| o.target_round.is_some_and(|t| t <= 1)),
            oldies_by_round1: count(&|o| o.oldies),
            rounds: stats::mean_estimate(&rounds),
            max_rounds: runs.iter().map(|o| o.rounds).max().unwrap_or(0),
            mean_round1_new: runs.iter().map(|o| o.round1_new as f64).sum::<f64>() / runs.len() as f64,
            round1_bound,
        });
    }
    let summary = BootstrapSummary {
        model: cfg.model,
        n: cfg.n,
        p: cfg.p,
        m: cfg.m,
        k: cfg.k,
        mode: cfg.mode,
        count_multiplicity: cfg.count_multiplicity,
        round_budget: cfg.round_budget,
        points,
    };
    Ok(RunnerOutput::new(&swept, records, summary))
}
