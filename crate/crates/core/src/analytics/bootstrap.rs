use serde::{Deserialize, Serialize};

use super::eta::solve_eta;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round1Bound {
    /// Raw value of the sum.
    pub raw: f64,
    /// `min(raw, n)`; round one cannot infect more than `n` nodes.
    pub bound: f64,
    pub clamped: bool,
}

/// Upper bound on the expected number of nodes infected in round one when
/// `s_size` uniformly random seeds start a `k`-complex contagion on PA(n):
///
/// `sum_{x=k}^{m n} min((x s/n)^k / (1 - x s/n), 1) m n eta_x`,
///
/// with the `min` resolved by cutting at `x s / n = 1/2`.
pub fn expected_round1_infections(p: f64, m: usize, k: usize, s_size: usize, n: usize) -> Result<Round1Bound> {
    if s_size < k {
        return Err(Error::Config(format!("seed count {s_size} below threshold k = {k}")));
    }
    let x_max = (m * n).max(m + 2);
    let table = solve_eta(p, m, x_max)?;
    let (nf, sf) = (n as f64, s_size as f64);
    let top = table.truncated_at.unwrap_or(x_max + 1);
    let raw: f64 = (k..top)
        .map(|x| {
            let q = x as f64 * sf / nf;
            let weight = if q <= 0.5 { q.powi(k as i32) / (1.0 - q) } else { 1.0 };
            weight * table.bound(x, n)
        })
        .sum();
    Ok(Round1Bound { raw, bound: raw.min(nf), clamped: raw > nf })
}
