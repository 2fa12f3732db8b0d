use serde::{Deserialize, Serialize};

use super::{sweep, RunRecord, RunnerOutput, Settings};
use crate::branching::{self, BranchingConfig, BranchingRun, Constants};
use crate::error::{Error, Result};
use crate::stats::{self, MeanEstimate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchExtinctionConfig {
    pub m: usize,
    pub alpha: f64,
    pub x: usize,
    #[serde(default = "default_c3")]
    pub c3: f64,
    /// Graph size that sets the depth budget.
    #[serde(default = "default_budget_n")]
    pub budget_n: f64,
    /// Root labels for the zero-label origin check.
    #[serde(default)]
    pub zero_label_xs: Vec<usize>,
    /// Depths with fewer surviving runs are skipped in the ratio check.
    #[serde(default = "default_min_survivors")]
    pub min_survivors: usize,
}

fn default_c3() -> f64 {
    1.0
}

fn default_budget_n() -> f64 {
    65536.0
}

fn default_min_survivors() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiRatio {
    pub depth: usize,
    pub alive_runs: usize,
    /// Mean over surviving runs of `phi(t + 1) / phi(t)`.
    pub ratio: MeanEstimate,
    /// `delta + 3 * stderr`.
    pub limit: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroLabelCheck {
    pub x: usize,
    pub count: MeanEstimate,
    /// `d^x`.
    pub expected: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub m: usize,
    pub alpha: f64,
    pub x: usize,
    pub constants: Constants,
    pub depth_budget: usize,
    pub runs: usize,
    pub survivors_at_budget: u64,
    pub extinction_depth: MeanEstimate,
    pub max_extinction_depth: Option<usize>,
    pub phi_ratios: Vec<PhiRatio>,
    pub zero_labels: Vec<ZeroLabelCheck>,
}

impl BranchSummary {
    pub fn phi_ratios_pass(&self) -> bool {
        self.phi_ratios.iter().all(|r| r.pass)
    }

    pub fn zero_labels_pass(&self) -> bool {
        self.zero_labels.iter().all(|z| z.pass)
    }
}

/// Grid point 0 runs `B(m, x, alpha)` to the depth budget; grid point `i > 0`
/// runs root label `zero_label_xs[i - 1]` to extinction for the origin count.
pub fn run_branch_extinction(cfg: &BranchExtinctionConfig, settings: &Settings) -> Result<RunnerOutput<BranchSummary>> {
    let constants = branching::constants(cfg.m, cfg.alpha)?;
    let budget = branching::depth_budget(cfg.m, cfg.alpha, cfg.x, cfg.budget_n, cfg.c3)?;
    if cfg.x == 0 {
        return Err(Error::Config("root label x must be >= 1".into()));
    }
    let roots: Vec<usize> = std::iter::once(cfg.x).chain(cfg.zero_label_xs.iter().copied()).collect();
    let swept = sweep(settings, roots.len(), |g, _, rng| {
        let max_depth = if g == 0 { budget } else { 100_000 };
        let c = BranchingConfig { m: cfg.m, x: roots[g], alpha: cfg.alpha, max_depth, seed: 0 };
        branching::simulate_with(&c, rng)
    })?;

    let records = swept
        .tasks
        .iter()
        .map(|t| RunRecord {
            m: Some(cfg.m),
            alpha: Some(cfg.alpha),
            x: Some(roots[t.grid]),
            extinct_at: t.value.extinct_at,
            survived: (t.grid == 0).then(|| t.value.survivors(budget) > 0),
            zero_labels: Some(t.value.zero_label_count()),
            ..t.record()
        })
        .collect();

    let main: Vec<&BranchingRun> = swept.tasks.iter().filter(|t| t.grid == 0).map(|t| &t.value).collect();
    let depths: Vec<f64> = main.iter().filter_map(|r| r.extinct_at).map(|d| d as f64).collect();
    let mut phi_ratios = Vec::new();
    for t in 0..budget {
        let ratios: Vec<f64> = main
            .iter()
            .filter(|r| r.survivors(t) > 0)
            .map(|r| {
                let now = r.log_phi_at(t).expect("in regime");
                (r.log_phi_at(t + 1).expect("in regime") - now).exp()
            })
            .collect();
        if ratios.len() < cfg.min_survivors {
            continue;
        }
        let ratio = stats::mean_estimate(&ratios);
        let limit = constants.delta + 3.0 * ratio.std_err;
        phi_ratios.push(PhiRatio { depth: t, alive_runs: ratios.len(), pass: ratio.mean <= limit, ratio, limit });
    }

    let mut zero_labels = Vec::new();
    for (g, &x) in roots.iter().enumerate().skip(1) {
        let counts: Vec<f64> =
            swept.tasks.iter().filter(|t| t.grid == g).map(|t| t.value.zero_label_count() as f64).collect();
        if counts.is_empty() {
            continue;
        }
        let count = stats::mean_estimate(&counts);
        let expected = constants.d.powi(x as i32);
        let z = if count.std_err > 0.0 { (count.mean - expected) / count.std_err } else if count.mean == expected { 0.0 } else { f64::INFINITY };
        zero_labels.push(ZeroLabelCheck { x, count, expected, z, pass: z.abs() <= 3.0 });
    }

    let summary = BranchSummary {
        m: cfg.m,
        alpha: cfg.alpha,
        x: cfg.x,
        constants,
        depth_budget: budget,
        runs: main.len(),
        survivors_at_budget: main.iter().filter(|r| r.survivors(budget) > 0).count() as u64,
        extinction_depth: stats::mean_estimate(&depths),
        max_extinction_depth: main.iter().filter_map(|r| r.extinct_at).max(),
        phi_ratios,
        zero_labels,
    };
    Ok(RunnerOutput::new(&swept, records, summary))
}
