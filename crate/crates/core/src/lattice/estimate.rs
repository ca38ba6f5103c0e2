//! Monte Carlo estimators over trajectory ensembles.

use super::{spin_product, LatticeError, TrajectorySample};

/// Sample mean and standard error (unbiased variance, divided by sqrt(N)).
pub fn mean_and_stderr(values: &[f64]) -> Result<(f64, f64), LatticeError> {
    let n = values.len();
    if n < 2 {
        return Err(LatticeError::TooFewSamples(n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    Ok((mean, (var / n as f64).sqrt()))
}

/// Monte Carlo estimate of `E[eta(x_1) ... eta(x_k)]` over the ensemble.
pub fn estimate_products(
    samples: &[TrajectorySample],
    points: &[i64],
) -> Result<(f64, f64), LatticeError> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(LatticeError::DuplicatePoints);
    }
    let values: Vec<f64> = samples
        .iter()
        .map(|s| if points.iter().all(|&x| s.config.occupied(x)) { 1.0 } else { 0.0 })
        .collect();
    mean_and_stderr(&values)
}

/// Monte Carlo estimate of `E[prod_i sigma_{y_{2i-1}, y_{2i}}]` for an
/// ordered vector of `2n` sites.
pub fn estimate_spin_products(
    samples: &[TrajectorySample],
    ys: &[i64],
    theta: f64,
) -> Result<(f64, f64), LatticeError> {
    let values: Vec<f64> = samples
        .iter()
        .map(|s| spin_product(&s.config, ys, theta))
        .collect::<Result<_, _>>()?;
    mean_and_stderr(&values)
}
