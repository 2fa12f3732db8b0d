//! The labelled branching process `B(m, x, alpha)`.
//!
//! A root labelled `x` sits at depth 0. Every node with label `i >= 1` has `m`
//! children; each child independently takes label `i - 1` with probability
//! `alpha` and keeps label `i` otherwise. Label-0 nodes are sterile.
//!
//! Only the per-depth label census is tracked: a label-`j` population of size
//! `N` yields `Binomial(m N, alpha)` demoted children, which has the same law
//! as expanding the tree node by node.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::rng::{self, StreamRng};
use crate::stats::{self, Proportion};

pub const POPULATION_CAP: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchingConfig {
    pub m: usize,
    pub x: usize,
    pub alpha: f64,
    pub max_depth: usize,
    pub seed: u64,
}

impl BranchingConfig {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.m == 0 {
            return Err(Error::Config("m must be >= 1".into()));
        }
        Ok(())
    }
}

/// `d` is the expected number of label-`(i-1)` origins below a label-`i`
/// node; the potential contracts by `delta` per depth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub d: f64,
    pub delta: f64,
}

impl Constants {
    pub fn raw(m: usize, alpha: f64) -> Constants {
        let m = m as f64;
        let d = m * alpha / (1.0 - m * (1.0 - alpha));
        let delta = m * (1.0 - alpha) + 1.0 / m - (1.0 - alpha);
        Constants { d, delta }
    }

    /// `ln(m d)`, the log-weight of one label step in the potential.
    pub fn log_step(&self, m: usize) -> f64 {
        (m as f64 * self.d).ln()
    }
}

pub fn in_regime(m: usize, alpha: f64) -> bool {
    m >= 1 && alpha > 1.0 - 1.0 / m as f64 && Constants::raw(m, alpha).delta < 1.0
}

/// `(d, delta)`; fails outside `alpha > 1 - 1/m` with `delta < 1`.
pub fn constants(m: usize, alpha: f64) -> Result<Constants> {
    if !in_regime(m, alpha) {
        return Err(Error::Regime { m, alpha });
    }
    Ok(Constants::raw(m, alpha))
}

/// `ceil(c2 ln n)` with `c1 = x / ln n`: the depth after which the process
/// survives with probability at most `n^-(c3 + 1)`.
pub fn depth_budget(m: usize, alpha: f64, x: usize, n: f64, c3: f64) -> Result<usize> {
    let k = constants(m, alpha)?;
    let ln_n = n.ln();
    let c1 = x as f64 / ln_n;
    let c2 = (c3 + 1.0 + c1 * k.log_step(m)) / (1.0 / k.delta).ln();
    Ok((c2 * ln_n).ceil() as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchingRun {
    pub m: usize,
    pub x: usize,
    /// `census[t][j]` is the number of label-`j` nodes at depth `t`.
    pub census: Vec<Vec<u64>>,
    /// `ln phi(t)`; absent outside the contracting regime. `-inf` when `phi(t) = 0`.
    pub log_phi: Option<Vec<f64>>,
    /// First depth without positive-label nodes; `None` if the depth cap hit first.
    pub extinct_at: Option<usize>,
}

impl BranchingRun {
    pub fn last_depth(&self) -> usize {
        self.census.len() - 1
    }

    /// Positive-label population at depth `t` (zero beyond the recorded depths).
    pub fn survivors(&self, t: usize) -> u64 {
        self.census.get(t).map_or(0, |row| row[1..].iter().sum())
    }

    pub fn phi(&self, t: usize) -> Option<f64> {
        self.log_phi.as_ref().map(|lp| lp.get(t).map_or(0.0, |l| l.exp()))
    }

    pub fn log_phi_at(&self, t: usize) -> Option<f64> {
        self.log_phi.as_ref().map(|lp| lp.get(t).copied().unwrap_or(f64::NEG_INFINITY))
    }

    /// Every label-0 node is an origin, since label-0 nodes have no children.
    pub fn zero_label_count(&self) -> u64 {
        self.census.iter().map(|row| row[0]).sum()
    }
}

pub fn log_potential(row: &[u64], log_step: f64) -> f64 {
    let terms: Vec<f64> = row
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0)
        .map(|(j, &c)| (c as f64).ln() + j as f64 * log_step)
        .collect();
    log_sum_exp(&terms)
}

pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

pub fn simulate(cfg: &BranchingConfig) -> Result<BranchingRun> {
    simulate_with(cfg, &mut rng::stream(cfg.seed))
}

pub fn simulate_with(cfg: &BranchingConfig, rng: &mut StreamRng) -> Result<BranchingRun> {
    cfg.validate()?;
    let BranchingConfig { m, x, alpha, max_depth, .. } = *cfg;
    let log_step = in_regime(m, alpha).then(|| Constants::raw(m, alpha).log_step(m));

    let mut root = vec![0u64; x + 1];
    root[x] = 1;
    let mut census = vec![root];
    let mut extinct_at = None;
    loop {
        let t = census.len() - 1;
        let current = &census[t];
        if current[1..].iter().all(|&c| c == 0) {
            extinct_at = Some(t);
            break;
        }
        if t >= max_depth {
            break;
        }
        let mut next = vec![0u64; x + 1];
        for j in 1..=x {
            let children = current[j] * m as u64;
            if children == 0 {
                continue;
            }
            let demoted = if alpha >= 1.0 {
                children
            } else {
                Binomial::new(children, alpha)
                    .expect("alpha validated")
                    .sample(rng)
            };
            next[j - 1] += demoted;
            next[j] += children - demoted;
        }
        let population: u64 = next.iter().sum();
        if population > POPULATION_CAP {
            return Err(Error::PopulationOverflow { depth: t + 1, population, cap: POPULATION_CAP });
        }
        census.push(next);
    }
    let log_phi = log_step.map(|s| census.iter().map(|row| log_potential(row, s)).collect());
    Ok(BranchingRun { m, x, census, log_phi, extinct_at })
}

/// `runs` independent runs; run `i` uses the stream `derive_seed(cfg.seed, [i])`.
pub fn simulate_many(cfg: &BranchingConfig, runs: usize, exec: Execution) -> Result<Vec<BranchingRun>> {
    cfg.validate()?;
    par::map_indexed(runs, exec, |i| {
        let mut rng = rng::stream(rng::derive_seed(cfg.seed, &[i as u64]));
        simulate_with(cfg, &mut rng)
    })
    .into_iter()
    .collect()
}

/// Fraction of runs still holding positive labels at `depth_budget`, with a
/// 95% Wilson interval.
pub fn extinction_tail(
    cfg: &BranchingConfig,
    depth_budget: usize,
    runs: usize,
    exec: Execution,
) -> Result<Proportion> {
    if runs == 0 {
        return Err(Error::Config("runs must be >= 1".into()));
    }
    let capped = BranchingConfig { max_depth: depth_budget, ..*cfg };
    let alive: Vec<bool> = par::map_indexed(runs, exec, |i| {
        let mut rng = rng::stream(rng::derive_seed(cfg.seed, &[i as u64]));
        simulate_with(&capped, &mut rng).map(|r| r.survivors(depth_budget) > 0)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let survivors = alive.iter().filter(|&&a| a).count() as u64;
    Ok(stats::wilson(survivors, runs as u64, 0.95))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthProfile {
    pub depth: usize,
    pub mean_phi: f64,
    pub survivor_fraction: f64,
}

/// Mean potential and survivor fraction per depth `0..=cfg.max_depth` over
/// the given runs. Extinct runs contribute `phi = 0`.
pub fn depth_profile(runs: &[BranchingRun], max_depth: usize) -> Vec<DepthProfile> {
    let count = runs.len() as f64;
    (0..=max_depth)
        .map(|t| {
            let logs: Vec<f64> = runs.iter().filter_map(|r| r.log_phi_at(t)).collect();
            let mean_phi = if logs.is_empty() {
                f64::NAN
            } else {
                (log_sum_exp(&logs) - count.ln()).exp()
            };
            let alive = runs.iter().filter(|r| r.survivors(t) > 0).count() as f64;
            DepthProfile { depth: t, mean_phi, survivor_fraction: alive / count }
        })
        .collect()
}
