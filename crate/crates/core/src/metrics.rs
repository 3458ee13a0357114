//! Mean absolute scaled error and trial summaries.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forecast::ForecastRun;

/// MASE with its components.
///
/// `value = numerator / (k · scale)`, where `numerator = Σ|p_j − c_j|` over
/// the `k` test steps and `scale = Σ_{i=2..n}|x_i − x_{i−1}| / (n − 1)` is the
/// mean in-sample random-walk error on the `n` training values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaseScore {
    pub value: f64,
    pub numerator: f64,
    pub denominator_scale: f64,
    pub n: usize,
    pub k: usize,
}

/// Scores a forecast run.
pub fn mase(run: &ForecastRun) -> Result<MaseScore> {
    mase_from_parts(&run.train_prefix, &run.predictions, &run.truths)
}

pub fn mase_from_parts(train: &[f64], predictions: &[f64], truths: &[f64]) -> Result<MaseScore> {
    if train.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: train.len(),
        });
    }
    if predictions.len() != truths.len() || predictions.is_empty() {
        return Err(invalid(format!(
            "need equal, non-zero numbers of predictions and truths (got {} and {})",
            predictions.len(),
            truths.len()
        )));
    }
    let n = train.len();
    let k = predictions.len();
    let scale = train.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (n - 1) as f64;
    if scale == 0.0 {
        return Err(Error::UndefinedScale);
    }
    let numerator: f64 = predictions
        .iter()
        .zip(truths)
        .map(|(p, c)| (p - c).abs())
        .sum();
    Ok(MaseScore {
        value: numerator / (k as f64 * scale),
        numerator,
        denominator_scale: scale,
        n,
        k,
    })
}

/// Mean and sample standard deviation (`n − 1` denominator; 0 for one value).
pub fn trial_stats(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(invalid("trial statistics need at least one value"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// [`trial_stats`] over the values of MASE scores.
pub fn mase_trial_stats(scores: &[MaseScore]) -> Result<(f64, f64)> {
    trial_stats(&scores.iter().map(|s| s.value).collect::<Vec<_>>())
}
