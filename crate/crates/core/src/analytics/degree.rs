use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Total degree assumed for the graph on the first `t - 1` nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeNormalization {
    /// `2 m (t - 1)`.
    #[default]
    Asymptotic,
    /// `2 m (t - 1) - m (m + 1)`: exact for a graph grown from the `(m+1)`-clique.
    Clique,
}

/// Expected degree of node `s` at times `s..=n` in the independent PA model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedDegreeTable {
    pub p: f64,
    pub m: usize,
    pub s: usize,
    pub normalization: DegreeNormalization,
    /// `values[t - s]` is `E[d_t(s)]`.
    pub values: Vec<f64>,
}

impl ExpectedDegreeTable {
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - self.s]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("table is never empty")
    }
}

/// `E[d_t(s)] = (2t - 2 + p)/(2t - 2) E[d_{t-1}(s)] + m (1 - p)/(t - 1)`, from `E[d_s(s)] = m`.
pub fn expected_degree(p: f64, m: usize, s: usize, n: usize) -> Result<ExpectedDegreeTable> {
    expected_degree_with(p, m, s, n, DegreeNormalization::Asymptotic)
}

pub fn expected_degree_with(
    p: f64,
    m: usize,
    s: usize,
    n: usize,
    normalization: DegreeNormalization,
) -> Result<ExpectedDegreeTable> {
    if s < 2 {
        return Err(Error::Config(format!("s must be >= 2, got {s}")));
    }
    if normalization == DegreeNormalization::Clique && s <= m + 1 {
        return Err(Error::Config(format!("node {s} belongs to the initial clique")));
    }
    if n < s || !(0.0..=1.0).contains(&p) || m == 0 {
        return Err(Error::Config(format!("need n >= s, 0 <= p <= 1, m >= 1 (n = {n}, p = {p}, m = {m})")));
    }
    let mf = m as f64;
    let mut values = Vec::with_capacity(n - s + 1);
    let mut d = mf;
    values.push(d);
    for t in s + 1..=n {
        let older = (t - 1) as f64;
        let total = match normalization {
            DegreeNormalization::Asymptotic => 2.0 * mf * older,
            DegreeNormalization::Clique => 2.0 * mf * older - mf * (mf + 1.0),
        };
        d = d * (1.0 + p * mf / total) + mf * (1.0 - p) / older;
        values.push(d);
    }
    Ok(ExpectedDegreeTable { p, m, s, normalization, values })
}
