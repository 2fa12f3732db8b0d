use serde::{Deserialize, Serialize};

use super::{sweep, RunRecord, RunnerOutput, Settings};
use crate::error::{Error, Result};
use crate::mcv::{self, Circuit, Threshold, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McvSuiteConfig {
    pub depth_max: usize,
    pub width_max: usize,
    pub ks: Vec<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub threshold: Threshold,
}

fn default_epsilon() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McvSummary {
    pub circuits: usize,
    pub passed: usize,
    pub timing_consistent: usize,
    pub pad_all_or_nothing: usize,
    pub true_outputs: usize,
    /// Verdicts for the single-gate ONE and ZERO circuits, per `k`.
    pub constant_cases: Vec<(String, usize, bool)>,
    /// Text of the first few failing circuits.
    pub failures: Vec<String>,
}

impl McvSummary {
    pub fn all_pass(&self) -> bool {
        self.passed == self.circuits
            && self.timing_consistent == self.circuits
            && self.pad_all_or_nothing == self.circuits
            && self.constant_cases.iter().all(|c| c.2)
    }
}

fn verdict_ok(v: &Verdict) -> bool {
    v.pass && v.timing_consistent && v.pad_all_or_nothing && v.epsilon_gap.unwrap_or(true)
}

/// Checks `replications` random layered circuits; circuit `i` uses
/// `k = ks[i % ks.len()]`.
pub fn run_mcv_suite(cfg: &McvSuiteConfig, settings: &Settings) -> Result<RunnerOutput<McvSummary>> {
    if cfg.ks.is_empty() {
        return Err(Error::Config("ks must not be empty".into()));
    }
    let swept = sweep(settings, 1, |_, rep, rng| {
        let c = mcv::random_circuit(rng, cfg.depth_max, cfg.width_max);
        let k = cfg.ks[rep % cfg.ks.len()];
        let v = mcv::check(&c, k, cfg.epsilon, cfg.threshold)?;
        Ok((c, k, v))
    })?;
    let records = swept
        .tasks
        .iter()
        .map(|t| {
            let (c, k, v) = &t.value;
            RunRecord {
                k: Some(*k),
                seed_count: Some(c.gates().iter().filter(|g| g.kind == mcv::GateKind::One).count() * k),
                n: Some(v.vertices),
                rounds_to_fixation: Some(v.rounds_to_fixation),
                infected_count: Some(v.infected_count),
                fully_infected: Some(v.infected_count == v.vertices),
                circuit_depth: Some(c.depth()),
                circuit_gates: Some(c.gates().len()),
                circuit_value: Some(v.circuit_value),
                pass: Some(verdict_ok(v)),
                ..t.record()
            }
        })
        .collect();

    let mut constant_cases = Vec::new();
    for (name, text) in [("ONE", "gate 0 0 ONE\noutput 0\n"), ("ZERO", "gate 0 0 ZERO\noutput 0\n")] {
        let c: Circuit = mcv::parse_circuit(text)?;
        for &k in &cfg.ks {
            let v = mcv::check(&c, k, cfg.epsilon, cfg.threshold)?;
            let expected_count = if name == "ONE" { v.vertices } else { 0 };
            constant_cases.push((name.to_string(), k, verdict_ok(&v) && v.infected_count == expected_count));
        }
    }
    let verdicts: Vec<&Verdict> = swept.tasks.iter().map(|t| &t.value.2).collect();
    let summary = McvSummary {
        circuits: verdicts.len(),
        passed: verdicts.iter().filter(|v| v.pass).count(),
        timing_consistent: verdicts.iter().filter(|v| v.timing_consistent).count(),
        pad_all_or_nothing: verdicts.iter().filter(|v| v.pad_all_or_nothing).count(),
        true_outputs: verdicts.iter().filter(|v| v.circuit_value).count(),
        constant_cases,
        failures: swept.tasks.iter().filter(|t| !verdict_ok(&t.value.2)).take(5).map(|t| t.value.0.to_text()).collect(),
    };
    Ok(RunnerOutput::new(&swept, records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Execution;

    #[test]
    fn small_suite_passes() {
        let cfg = McvSuiteConfig { depth_max: 3, width_max: 4, ks: vec![2, 3], epsilon: 0.5, threshold: Threshold::MinimumFeasible };
        let out = run_mcv_suite(&cfg, &Settings::new(20, 8, Execution::Sequential)).unwrap();
        assert!(out.summary.all_pass(), "{:?}", out.summary);
        assert_eq!(out.summary.constant_cases.len(), 4);
        assert!(out.records.iter().all(|r| r.pass == Some(true)));
    }
}
