use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, PowerLawFit};
use crate::error::Result;

/// Values below this are treated as underflow and end the table.
pub const ETA_FLOOR: f64 = 1e-300;

/// Where the source term `c_x = 1` sits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceDegree {
    /// `x = m`: every arriving node is born with degree `m`.
    #[default]
    Born,
    /// `x = m + 1`, for sensitivity checks.
    BornPlusOne,
}

/// Drift `a_x = p x / 2 + m (1 - p)`, source `c_x` and the profile
/// `eta_x = a_{x-1} / (1 + a_x) eta_{x-1} + c_x / (1 + a_x)`, which bounds the
/// expected degree counts through `E[N_n(x)] <= m n eta_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MasterEquationTable {
    pub p: f64,
    pub m: usize,
    pub source_degree: usize,
    /// Indexed by `x` in `0..=x_max`.
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub eta: Vec<f64>,
    /// First `x` at which `eta` fell below [`ETA_FLOOR`]; entries from there on are 0.
    pub truncated_at: Option<usize>,
}

impl MasterEquationTable {
    pub fn x_max(&self) -> usize {
        self.eta.len() - 1
    }

    pub fn eta(&self, x: usize) -> f64 {
        self.eta.get(x).copied().unwrap_or(0.0)
    }

    /// `m n eta_x`.
    pub fn bound(&self, x: usize, n: usize) -> f64 {
        self.m as f64 * n as f64 * self.eta(x)
    }

    pub fn tail_fit(&self, lo: usize, hi: usize) -> Result<PowerLawFit> {
        fit_power_law(
            (lo..=hi.min(self.x_max())).map(|x| (x as f64, self.eta(x))),
            (lo as f64, hi as f64),
        )
    }
}

pub fn solve_eta(p: f64, m: usize, x_max: usize) -> Result<MasterEquationTable> {
    solve_eta_with_source(p, m, x_max, SourceDegree::Born)
}

pub fn solve_eta_with_source(
    p: f64,
    m: usize,
    x_max: usize,
    source: SourceDegree,
) -> Result<MasterEquationTable> {
    if !(0.0..=1.0).contains(&p) || m < 1 || x_max < m + 2 {
        return Err(crate::Error::Config(format!(
            "need 0 <= p <= 1, m >= 1, x_max >= m + 2 (p = {p}, m = {m}, x_max = {x_max})"
        )));
    }
    let source_degree = match source {
        SourceDegree::Born => m,
        SourceDegree::BornPlusOne => m + 1,
    };
    let a: Vec<f64> = (0..=x_max).map(|x| p * x as f64 / 2.0 + m as f64 * (1.0 - p)).collect();
    let c: Vec<f64> = (0..=x_max).map(|x| if x == source_degree { 1.0 } else { 0.0 }).collect();
    let mut eta = vec![0.0; x_max + 1];
    let mut truncated_at = None;
    for x in 1..=x_max {
        let value = (a[x - 1] * eta[x - 1] + c[x]) / (1.0 + a[x]);
        if x > source_degree && value < ETA_FLOOR {
            truncated_at = Some(x);
            break;
        }
        eta[x] = value;
    }
    Ok(MasterEquationTable { p, m, source_degree, a, c, eta, truncated_at })
}
