use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{sweep, RunRecord, RunnerOutput, Settings};
use crate::analytics::{degree_histogram, fit_power_law, solve_eta, PowerLawFit};
use crate::error::{Error, Result};
use crate::graph::{generate_with, GenConfig, Model};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeLawConfig {
    #[serde(default = "default_model")]
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    /// Mixing values for the recurrence-tail slope check.
    #[serde(default = "default_eta_ps")]
    pub eta_ps: Vec<f64>,
    #[serde(default = "default_tail_range")]
    pub tail_range: (usize, usize),
    #[serde(default = "default_min_observations")]
    pub min_observations: u64,
    /// Allowed excess of the mean count over `m n eta_x`.
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Degree range for a fit of the pooled empirical histogram.
    #[serde(default = "default_empirical_range")]
    pub empirical_range: (usize, usize),
}

fn default_model() -> Model {
    Model::PaIndependent
}

fn default_eta_ps() -> Vec<f64> {
    vec![0.5, 1.0]
}

fn default_tail_range() -> (usize, usize) {
    (1000, 10_000)
}

fn default_min_observations() -> u64 {
    50
}

fn default_slack() -> f64 {
    1.25
}

fn default_empirical_range() -> (usize, usize) {
    (5, 60)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaSlopeCheck {
    pub p: f64,
    pub fit: PowerLawFit,
    /// `-(1 + 2/p)`.
    pub expected: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeBoundCheck {
    pub x: usize,
    /// Pooled over all graphs.
    pub observations: u64,
    pub mean_count: f64,
    /// `m n eta_x`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeLawSummary {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub graphs: usize,
    pub slack: f64,
    pub eta_slopes: Vec<EtaSlopeCheck>,
    pub bound_checks: Vec<DegreeBoundCheck>,
    pub empirical_fit: Option<PowerLawFit>,
    /// `degree -> pooled count`.
    pub pooled: BTreeMap<usize, u64>,
}

impl DegreeLawSummary {
    pub fn all_pass(&self) -> bool {
        self.eta_slopes.iter().all(|c| c.pass) && self.bound_checks.iter().all(|c| c.pass)
    }
}

/// Checks the recurrence tail slope and compares pooled degree counts with
/// the `m n eta_x` bound.
pub fn run_degree_law(cfg: &DegreeLawConfig, settings: &Settings) -> Result<RunnerOutput<DegreeLawSummary>> {
    GenConfig::new(cfg.model, cfg.n, cfg.m, cfg.p, 0).validate()?;
    let (lo, hi) = cfg.tail_range;
    if lo < 1 || hi <= lo {
        return Err(Error::Config(format!("bad tail range {:?}", cfg.tail_range)));
    }
    let mut eta_slopes = Vec::new();
    for &p in &cfg.eta_ps {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Config(format!("tail slope needs p in (0, 1], got {p}")));
        }
        let fit = solve_eta(p, cfg.m, hi)?.tail_fit(lo, hi)?;
        let expected = -(1.0 + 2.0 / p);
        eta_slopes.push(EtaSlopeCheck { p, fit, expected, pass: (fit.slope - expected).abs() <= 0.1 });
    }

    let swept = sweep(settings, 1, |_, _, rng| {
        let g = generate_with(&GenConfig::new(cfg.model, cfg.n, cfg.m, cfg.p, 0), rng)?;
        Ok(degree_histogram(&g))
    })?;
    let records = swept
        .tasks
        .iter()
        .map(|t| RunRecord {
            model: Some(cfg.model),
            n: Some(cfg.n),
            m: Some(cfg.m),
            p: Some(cfg.p),
            max_degree: t.value.keys().next_back().map(|&d| d as u64),
            ..t.record()
        })
        .collect();

    let mut pooled: BTreeMap<usize, u64> = BTreeMap::new();
    for t in &swept.tasks {
        for (&x, &c) in &t.value {
            *pooled.entry(x).or_default() += c;
        }
    }
    let graphs = swept.tasks.len();
    let x_top = pooled.keys().next_back().copied().unwrap_or(cfg.m);
    let table = solve_eta(cfg.p, cfg.m, x_top.max(cfg.m + 2))?;
    let bound_checks = pooled
        .iter()
        .filter(|(_, &c)| c >= cfg.min_observations)
        .map(|(&x, &c)| {
            let mean_count = c as f64 / graphs as f64;
            let bound = table.bound(x, cfg.n);
            DegreeBoundCheck { x, observations: c, mean_count, bound, pass: mean_count <= bound * cfg.slack }
        })
        .collect();
    let empirical_fit = fit_power_law(
        pooled.iter().map(|(&x, &c)| (x as f64, c as f64)),
        (cfg.empirical_range.0 as f64, cfg.empirical_range.1 as f64),
    )
    .ok();

    let summary = DegreeLawSummary {
        model: cfg.model,
        n: cfg.n,
        m: cfg.m,
        p: cfg.p,
        graphs,
        slack: cfg.slack,
        eta_slopes,
        bound_checks,
        empirical_fit,
        pooled,
    };
    Ok(RunnerOutput::new(&swept, records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Execution;

    #[test]
    fn small_degree_law() {
        let cfg = DegreeLawConfig {
            model: Model::PaIndependent,
            n: 4096,
            m: 2,
            p: 1.0,
            eta_ps: vec![1.0],
            tail_range: (1000, 10_000),
            min_observations: 50,
            slack: 1.25,
            empirical_range: (5, 40),
        };
        let out = run_degree_law(&cfg, &Settings::new(3, 1, Execution::Sequential)).unwrap();
        let s = &out.summary;
        assert_eq!(s.graphs, 3);
        assert!(s.eta_slopes[0].pass, "{:?}", s.eta_slopes);
        assert!(!s.bound_checks.is_empty());
        assert!(s.all_pass(), "{:?}", s.bound_checks);
        let total: u64 = s.pooled.values().sum();
        assert_eq!(total, 3 * 4096);
        let slope = s.empirical_fit.unwrap().slope;
        assert!((-4.0..-2.0).contains(&slope), "{slope}");
    }
}
