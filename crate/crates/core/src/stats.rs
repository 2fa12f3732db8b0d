//! Small sampling-statistics helpers shared by the estimators.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided standard-normal quantile for the given confidence level.
pub fn z_for(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + confidence / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Wilson score interval.
pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Proportion {
    if trials == 0 {
        return Proportion { successes, trials, estimate: f64::NAN, lower: 0.0, upper: 1.0 };
    }
    let z = z_for(confidence);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Proportion {
        successes,
        trials,
        estimate: phat,
        lower: (centre - half).max(0.0),
        upper: (centre + half).min(1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub std_err: f64,
}

pub fn mean_estimate(values: &[f64]) -> MeanEstimate {
    let count = values.len();
    if count == 0 {
        return MeanEstimate { count, mean: f64::NAN, std_dev: f64::NAN, std_err: f64::NAN };
    }
    let n = count as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if count > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std_dev = var.sqrt();
    MeanEstimate { count, mean, std_dev, std_err: std_dev / n.sqrt() }
}

/// Ordinary least-squares line through `(x, y)`; returns `(slope, intercept, slope stderr)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if xs.len() > 2 {
        let sse: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_values() {
        assert!((z_for(0.95) - 1.959_964).abs() < 1e-5);
        assert!((z_for(0.99) - 2.575_829).abs() < 1e-5);
    }

    #[test]
    fn wilson_contains_estimate() {
        let p = wilson(30, 100, 0.95);
        assert!(p.lower < 0.3 && 0.3 < p.upper);
        let zero = wilson(0, 10_000, 0.95);
        assert_eq!(zero.lower, 0.0);
        assert!(zero.upper < 5e-4);
    }

    #[test]
    fn least_squares_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (s, b, e) = least_squares(&xs, &ys);
        assert!((s - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && e < 1e-9);
    }
}
