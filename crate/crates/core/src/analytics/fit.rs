use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Unweighted least-squares slope of `ln count` against `ln x` over the
/// points with `lo <= x <= hi` and a positive count.
pub fn fit_power_law<I>(histogram: I, x_range: (f64, f64)) -> Result<PowerLawFit>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (lo, hi) = x_range;
    let (xs, ys): (Vec<f64>, Vec<f64>) = histogram
        .into_iter()
        .filter(|&(x, c)| x >= lo && x <= hi && x > 0.0 && c > 0.0)
        .map(|(x, c)| (x.ln(), c.ln()))
        .unzip();
    let mut distinct = xs.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} distinct x values with positive counts in [{lo}, {hi}], need 5",
            distinct.len()
        )));
    }
    let (slope, intercept, stderr) = stats::least_squares(&xs, &ys);
    Ok(PowerLawFit { slope, intercept, stderr, points: xs.len() })
}
