//! Seeded, replicated sweeps over the generators and processes.
//!
//! A config names one experiment kind plus the replication count and a base
//! seed. Every `(grid point, replication)` pair draws from its own stream
//! `derive_seed(base_seed, [kind, grid, replication])`; tasks may run in any
//! order but records are merged back in `(grid, replication)` order, so the
//! CSV is byte-identical across reruns apart from the trailing `wall_time`.

mod bootstrap;
mod branch;
mod degree;
mod mcv_suite;
mod record;
mod spread;
mod staging;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::rng::{self, StreamRng};

pub use bootstrap::{run_bootstrap, BootstrapConfig, BootstrapMode, BootstrapPoint, BootstrapSummary};
pub use branch::{run_branch_extinction, BranchExtinctionConfig, BranchSummary, PhiRatio, ZeroLabelCheck};
pub use degree::{run_degree_law, DegreeBoundCheck, DegreeLawConfig, DegreeLawSummary, EtaSlopeCheck};
pub use mcv_suite::{run_mcv_suite, McvSuiteConfig, McvSummary};
pub use record::{read_records, write_records, RunRecord};
pub use spread::{run_spread_time, SpreadGroup, SpreadPoint, SpreadTimeConfig, SpreadTimeSummary};
pub use staging::{run_staging, StageCheck, StagingConfig, StagingSummary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Experiment {
    SpreadTime(SpreadTimeConfig),
    BootstrapThreshold(BootstrapConfig),
    /// Bootstrap in `FULL` mode, tracking when the oldest nodes fall.
    OldiesRescue(BootstrapConfig),
    BranchExtinction(BranchExtinctionConfig),
    DegreeLaw(DegreeLawConfig),
    Staging(StagingConfig),
    McvSuite(McvSuiteConfig),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SpreadTime(_) => "SPREAD_TIME",
            Experiment::BootstrapThreshold(_) => "BOOTSTRAP_THRESHOLD",
            Experiment::OldiesRescue(_) => "OLDIES_RESCUE",
            Experiment::BranchExtinction(_) => "BRANCH_EXTINCTION",
            Experiment::DegreeLaw(_) => "DEGREE_LAW",
            Experiment::Staging(_) => "STAGING",
            Experiment::McvSuite(_) => "MCV_SUITE",
        }
    }

    fn tag(&self) -> u64 {
        match self {
            Experiment::SpreadTime(_) => 1,
            Experiment::BootstrapThreshold(_) => 2,
            Experiment::OldiesRescue(_) => 3,
            Experiment::BranchExtinction(_) => 4,
            Experiment::DegreeLaw(_) => 5,
            Experiment::Staging(_) => 6,
            Experiment::McvSuite(_) => 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Abort once ten times this is exceeded.
    #[serde(default)]
    pub expected_runtime_secs: Option<f64>,
    #[serde(default)]
    pub execution: Execution,
    /// Used when no output directory is given on the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, replications: usize, base_seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            replications,
            base_seed,
            expected_runtime_secs: None,
            execution: Execution::default(),
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if let Some(t) = self.expected_runtime_secs {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::Config(format!("expected_runtime_secs must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub(crate) fn settings(&self) -> Settings {
        Settings {
            kind: self.experiment.tag(),
            replications: self.replications,
            base_seed: self.base_seed,
            execution: self.execution,
            limit: self.expected_runtime_secs.map(|t| Duration::from_secs_f64(10.0 * t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Summary {
    SpreadTime(SpreadTimeSummary),
    BootstrapThreshold(BootstrapSummary),
    OldiesRescue(BootstrapSummary),
    BranchExtinction(BranchSummary),
    DegreeLaw(DegreeLawSummary),
    Staging(StagingSummary),
    McvSuite(McvSummary),
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub summary: Summary,
    /// False when the wall-clock guard stopped the sweep early.
    pub complete: bool,
    pub tasks: usize,
}

/// Runs one experiment in memory.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let s = cfg.settings();
    match &cfg.experiment {
        Experiment::SpreadTime(c) => run_spread_time(c, &s).map(|o| o.map(Summary::SpreadTime)),
        Experiment::BootstrapThreshold(c) => run_bootstrap(c, &s).map(|o| o.map(Summary::BootstrapThreshold)),
        Experiment::OldiesRescue(c) => {
            let c = BootstrapConfig { mode: BootstrapMode::Full, ..c.clone() };
            run_bootstrap(&c, &s).map(|o| o.map(Summary::OldiesRescue))
        }
        Experiment::BranchExtinction(c) => run_branch_extinction(c, &s).map(|o| o.map(Summary::BranchExtinction)),
        Experiment::DegreeLaw(c) => run_degree_law(c, &s).map(|o| o.map(Summary::DegreeLaw)),
        Experiment::Staging(c) => run_staging(c, &s).map(|o| o.map(Summary::Staging)),
        Experiment::McvSuite(c) => run_mcv_suite(c, &s).map(|o| o.map(Summary::McvSuite)),
    }
}

/// Runs the experiment and writes `records.csv` and `summary.json` into `out`.
/// If the wall-clock guard trips, `records.partial.csv` and
/// `summary.partial.json` are written instead and an error is returned.
pub fn run_to_dir(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentOutput> {
    let output = run(cfg)?;
    fs::create_dir_all(out)?;
    let (records, summary) =
        if output.complete { ("records.csv", "summary.json") } else { ("records.partial.csv", "summary.partial.json") };
    write_records(&out.join(records), &output.records)?;
    fs::write(out.join(summary), serde_json::to_string_pretty(&output.summary)? + "\n")?;
    if !output.complete {
        return Err(Error::BudgetExceeded {
            limit_secs: cfg.settings().limit.map_or(0.0, |d| d.as_secs_f64()),
            completed: output.records.len(),
            total: output.tasks,
        });
    }
    Ok(output)
}

/// Shared knobs for the runners.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub kind: u64,
    pub replications: usize,
    pub base_seed: u64,
    pub execution: Execution,
    pub limit: Option<Duration>,
}

impl Settings {
    /// Settings for calling a runner directly.
    pub fn new(replications: usize, base_seed: u64, execution: Execution) -> Self {
        Settings { kind: 0, replications, base_seed, execution, limit: None }
    }

    pub fn stream_seed(&self, grid: usize, replication: usize) -> u64 {
        rng::derive_seed(self.base_seed, &[self.kind, grid as u64, replication as u64])
    }
}

/// Output of a runner before it is wrapped into [`Summary`].
#[derive(Clone, Debug)]
pub struct RunnerOutput<S> {
    pub records: Vec<RunRecord>,
    pub summary: S,
    pub complete: bool,
    pub tasks: usize,
}

impl<S> RunnerOutput<S> {
    fn map(self, f: impl FnOnce(S) -> Summary) -> ExperimentOutput {
        ExperimentOutput { records: self.records, summary: f(self.summary), complete: self.complete, tasks: self.tasks }
    }

    pub(crate) fn new<T>(swept: &Swept<T>, records: Vec<RunRecord>, summary: S) -> Self {
        RunnerOutput { records, summary, complete: swept.complete, tasks: swept.total }
    }
}

/// One finished `(grid, replication)` task.
pub(crate) struct Task<T> {
    pub grid: usize,
    pub replication: usize,
    pub stream_seed: u64,
    pub wall_time: f64,
    pub value: T,
}

impl<T> Task<T> {
    pub fn record(&self) -> RunRecord {
        RunRecord {
            grid: self.grid,
            replication: self.replication,
            stream_seed: self.stream_seed,
            wall_time: self.wall_time,
            ..RunRecord::default()
        }
    }
}

pub(crate) struct Swept<T> {
    pub tasks: Vec<Task<T>>,
    pub complete: bool,
    pub total: usize,
}

/// Fails if two pairs would share a stream.
pub fn check_streams(settings: &Settings, grid_len: usize) -> Result<()> {
    let mut seen: HashMap<u64, (usize, usize)> = HashMap::with_capacity(grid_len * settings.replications);
    for g in 0..grid_len {
        for r in 0..settings.replications {
            if let Some((g0, r0)) = seen.insert(settings.stream_seed(g, r), (g, r)) {
                return Err(Error::StreamCollision(format!("({g0}, {r0})"), format!("({g}, {r})")));
            }
        }
    }
    Ok(())
}

/// Runs `f` for every `(grid, replication)` pair, possibly in parallel, and
/// returns the finished tasks in `(grid, replication)` order.
pub(crate) fn sweep<T, F>(settings: &Settings, grid_len: usize, f: F) -> Result<Swept<T>>
where
    T: Send,
    F: Fn(usize, usize, &mut StreamRng) -> Result<T> + Sync + Send,
{
    if grid_len == 0 {
        return Err(Error::Config("empty grid".into()));
    }
    check_streams(settings, grid_len)?;
    let reps = settings.replications;
    let total = grid_len * reps;
    let start = Instant::now();
    let tripped = AtomicBool::new(false);
    let done = AtomicUsize::new(0);
    let results = par::map_indexed(total, settings.execution, |i| {
        let (grid, replication) = (i / reps, i % reps);
        if let Some(limit) = settings.limit {
            if tripped.load(Ordering::Relaxed) || start.elapsed() > limit {
                tripped.store(true, Ordering::Relaxed);
                return None;
            }
        }
        let stream_seed = settings.stream_seed(grid, replication);
        let mut rng = rng::stream(stream_seed);
        let t0 = Instant::now();
        let value = f(grid, replication, &mut rng);
        done.fetch_add(1, Ordering::Relaxed);
        Some(value.map(|value| Task { grid, replication, stream_seed, wall_time: t0.elapsed().as_secs_f64(), value }))
    });
    let mut tasks = Vec::with_capacity(total);
    for r in results.into_iter().flatten() {
        tasks.push(r?);
    }
    Ok(Swept { complete: tasks.len() == total, tasks, total })
}

fn default_true() -> bool {
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_per_pair_and_kind() {
        let s = Settings::new(50, 7, Execution::Sequential);
        check_streams(&s, 40).unwrap();
        let other = Settings { kind: 1, ..s };
        assert_ne!(s.stream_seed(0, 0), other.stream_seed(0, 0));
        assert_ne!(s.stream_seed(1, 0), s.stream_seed(0, 1));
    }

    #[test]
    fn sweep_keeps_order_in_both_modes() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let s = Settings::new(5, 1, exec);
            let out = sweep(&s, 3, |g, r, _| Ok(g * 10 + r)).unwrap();
            let got: Vec<usize> = out.tasks.iter().map(|t| t.value).collect();
            assert_eq!(got, (0..3).flat_map(|g| (0..5).map(move |r| g * 10 + r)).collect::<Vec<_>>());
            assert!(out.complete);
        }
    }

    #[test]
    fn budget_guard_stops_early() {
        let s = Settings { limit: Some(Duration::from_millis(20)), ..Settings::new(20, 1, Execution::Sequential) };
        let out = sweep(&s, 1, |_, _, _| {
            std::thread::sleep(Duration::from_millis(10));
            Ok(())
        })
        .unwrap();
        assert!(!out.complete);
        assert!(out.tasks.len() < 20);
    }

    #[test]
    fn errors_propagate() {
        let s = Settings::new(3, 1, Execution::Sequential);
        let out = sweep(&s, 1, |_, r, _| if r == 1 { Err(Error::EmptySeeds) } else { Ok(()) });
        assert!(matches!(out, Err(Error::EmptySeeds)));
    }

    #[test]
    fn config_json_is_tagged_by_kind() {
        let text = r#"{
            "kind": "MCV_SUITE",
            "depth_max": 3, "width_max": 4, "ks": [2],
            "replications": 5, "base_seed": 9
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.experiment.name(), "MCV_SUITE");
        assert_eq!(cfg.replications, 5);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(ExperimentConfig::from_json(r#"{"kind": "SPREAD", "replications": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(&text.replace("\"replications\": 5", "\"replications\": 0")).is_err());
    }
}
