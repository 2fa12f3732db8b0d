use serde::{Deserialize, Serialize};

use super::{default_true, sweep, RunRecord, RunnerOutput, Settings};
use crate::contagion::{self, ContagionConfig};
use crate::error::{Error, Result};
use crate::graph::{generate_with, GenConfig, Model};
use crate::stats::{self, MeanEstimate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadTimeConfig {
    pub models: Vec<Model>,
    pub ps: Vec<f64>,
    pub ns: Vec<usize>,
    pub m: usize,
    /// Defaults to `m`.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub count_multiplicity: bool,
    /// Also run the pruned process and check that it is dominated.
    #[serde(default = "default_true")]
    pub check_pruned: bool,
}

impl SpreadTimeConfig {
    pub fn k(&self) -> usize {
        self.k.unwrap_or(self.m)
    }

    fn grid(&self) -> Vec<(Model, f64, usize)> {
        let mut out = Vec::new();
        for &model in &self.models {
            for &p in &self.ps {
                for &n in &self.ns {
                    out.push((model, p, n));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadPoint {
    pub n: usize,
    pub runs: usize,
    pub fully_infected: usize,
    pub rounds: MeanEstimate,
    pub max_rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadGroup {
    pub model: Model,
    pub p: f64,
    pub points: Vec<SpreadPoint>,
    /// Least-squares `rounds = slope log2 n + intercept` over all sizes.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Slope over all sizes divided by the slope over sizes `<= n_max / 4`.
    pub slope_stability: Option<f64>,
    /// Every run checked against the pruned process was dominated by it.
    pub pruned_dominated: Option<bool>,
}

impl SpreadGroup {
    pub fn all_fully_infected(&self) -> bool {
        self.points.iter().all(|p| p.fully_infected == p.runs)
    }

    pub fn largest(&self) -> Option<&SpreadPoint> {
        self.points.iter().max_by_key(|p| p.n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadTimeSummary {
    pub k: usize,
    pub count_multiplicity: bool,
    pub groups: Vec<SpreadGroup>,
}

struct Outcome {
    rounds: usize,
    infected: usize,
    full: bool,
    pruned: Option<(usize, bool)>,
}

/// Grows a graph per `(model, p, n, replication)`, seeds its `k` oldest nodes
/// and runs the contagion to fixation.
pub fn run_spread_time(cfg: &SpreadTimeConfig, settings: &Settings) -> Result<RunnerOutput<SpreadTimeSummary>> {
    let k = cfg.k();
    if cfg.models.is_empty() || cfg.ps.is_empty() || cfg.ns.is_empty() {
        return Err(Error::Config("spread-time grid needs models, ps and ns".into()));
    }
    if k == 0 || k > cfg.m {
        return Err(Error::Config(format!("spread time needs 1 <= k <= m, got k = {k}, m = {}", cfg.m)));
    }
    let grid = cfg.grid();
    for &(model, p, n) in &grid {
        GenConfig::new(model, n, cfg.m, p, 0).validate()?;
    }
    let contagion_cfg = ContagionConfig::oldest(k).with_multiplicity(cfg.count_multiplicity);
    let swept = sweep(settings, grid.len(), |g, _, rng| {
        let (model, p, n) = grid[g];
        let graph = generate_with(&GenConfig::new(model, n, cfg.m, p, 0), rng)?;
        let full = contagion::run(&graph.to_multigraph(), &contagion_cfg)?;
        let pruned = if cfg.check_pruned {
            let pr = contagion::run_directed_pruned(&graph, &contagion_cfg)?;
            let slower = !(pr.fully_infected && full.fully_infected) || pr.rounds_to_fixation >= full.rounds_to_fixation;
            Some((pr.rounds_to_fixation, pr.infected_subset_of(&full) && slower))
        } else {
            None
        };
        Ok(Outcome { rounds: full.rounds_to_fixation, infected: full.infected_count, full: full.fully_infected, pruned })
    })?;

    let records = swept
        .tasks
        .iter()
        .map(|t| {
            let (model, p, n) = grid[t.grid];
            RunRecord {
                model: Some(model),
                n: Some(n),
                m: Some(cfg.m),
                p: Some(p),
                k: Some(k),
                seed_count: Some(k),
                rounds_to_fixation: Some(t.value.rounds),
                infected_count: Some(t.value.infected),
                fully_infected: Some(t.value.full),
                pruned_rounds: t.value.pruned.map(|p| p.0),
                pruned_dominated: t.value.pruned.map(|p| p.1),
                ..t.record()
            }
        })
        .collect();

    let mut groups = Vec::new();
    for &model in &cfg.models {
        for &p in &cfg.ps {
            let mut points = Vec::new();
            let mut dominated = cfg.check_pruned.then_some(true);
            for &n in &cfg.ns {
                let g = grid.iter().position(|&q| q == (model, p, n)).expect("grid point");
                let runs: Vec<&Outcome> = swept.tasks.iter().filter(|t| t.grid == g).map(|t| &t.value).collect();
                if runs.is_empty() {
                    continue;
                }
                let rounds: Vec<f64> = runs.iter().map(|o| o.rounds as f64).collect();
                if let Some(d) = dominated.as_mut() {
                    *d &= runs.iter().all(|o| o.pruned.is_some_and(|p| p.1));
                }
                points.push(SpreadPoint {
                    n,
                    runs: runs.len(),
                    fully_infected: runs.iter().filter(|o| o.full).count(),
                    rounds: stats::mean_estimate(&rounds),
                    max_rounds: runs.iter().map(|o| o.rounds).max().unwrap_or(0),
                });
            }
            let (slope, intercept, slope_stability) = log_fit(&points);
            groups.push(SpreadGroup { model, p, points, slope, intercept, slope_stability, pruned_dominated: dominated });
        }
    }
    let summary = SpreadTimeSummary { k, count_multiplicity: cfg.count_multiplicity, groups };
    Ok(RunnerOutput::new(&swept, records, summary))
}

fn slope_up_to(points: &[SpreadPoint], n_max: usize) -> Option<(f64, f64)> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        points.iter().filter(|p| p.n <= n_max).map(|p| ((p.n as f64).log2(), p.rounds.mean)).unzip();
    (xs.len() >= 2).then(|| {
        let (slope, intercept, _) = stats::least_squares(&xs, &ys);
        (slope, intercept)
    })
}

fn log_fit(points: &[SpreadPoint]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let Some(n_max) = points.iter().map(|p| p.n).max() else {
        return (None, None, None);
    };
    let all = slope_up_to(points, n_max);
    let early = slope_up_to(points, n_max / 4);
    let stability = match (all, early) {
        (Some((a, _)), Some((b, _))) if b != 0.0 => Some(a / b),
        _ => None,
    };
    (all.map(|f| f.0), all.map(|f| f.1), stability)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Execution;

    fn small() -> SpreadTimeConfig {
        SpreadTimeConfig {
            models: vec![Model::PaIndependent, Model::CmConditioned],
            ps: vec![0.5],
            ns: vec![64, 256, 1024],
            m: 2,
            k: None,
            count_multiplicity: true,
            check_pruned: true,
        }
    }

    #[test]
    fn tiny_graphs_fix_in_two_rounds() {
        // n = m + 2: the clique falls in round 1, the single newcomer by round 2
        let cfg = SpreadTimeConfig { ns: vec![4], ..small() };
        let out = run_spread_time(&cfg, &Settings::new(10, 3, Execution::Sequential)).unwrap();
        for r in &out.records {
            assert!(r.rounds_to_fixation.unwrap() <= 2);
        }
    }

    #[test]
    fn summary_and_records_line_up() {
        let out = run_spread_time(&small(), &Settings::new(6, 1, Execution::Sequential)).unwrap();
        assert!(out.complete);
        assert_eq!(out.records.len(), 2 * 3 * 6);
        assert_eq!(out.summary.groups.len(), 2);
        for g in &out.summary.groups {
            assert_eq!(g.points.len(), 3);
            assert!(g.slope.is_some() && g.slope_stability.is_some());
            assert_eq!(g.pruned_dominated, Some(true));
            assert!(g.all_fully_infected());
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = run_spread_time(&small(), &Settings::new(4, 5, Execution::Sequential)).unwrap();
        let b = run_spread_time(&small(), &Settings::new(4, 5, Execution::Parallel)).unwrap();
        assert_eq!(a.summary, b.summary);
        let strip = |v: &[RunRecord]| v.iter().map(|r| RunRecord { wall_time: 0.0, ..r.clone() }).collect::<Vec<_>>();
        assert_eq!(strip(&a.records), strip(&b.records));
    }

    #[test]
    fn rejects_bad_threshold() {
        let cfg = SpreadTimeConfig { k: Some(3), ..small() };
        assert!(run_spread_time(&cfg, &Settings::new(1, 1, Execution::Sequential)).is_err());
    }
}
