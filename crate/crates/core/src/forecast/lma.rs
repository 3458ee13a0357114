//! Lorenz method of analogues: forecast the successor of the nearest past
//! delay vector.

use serde::{Deserialize, Serialize};

use crate::embedding::{DelayParams, EmbeddingConfig};
use crate::error::{invalid, Result};
use crate::neighbors::squared_distance;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LmaConfig {
    /// Fixed `(tau, m)`; estimated from the training prefix when absent.
    pub params: Option<DelayParams>,
    /// Minimum `|query − candidate|` index separation; defaults to `tau`.
    pub min_separation: Option<usize>,
    pub embedding: EmbeddingConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmaForecast {
    pub prediction: f64,
    /// 0-based start index of the chosen analogue in the history.
    pub neighbor: Option<usize>,
    /// Set when no eligible analogue existed and the last value was used.
    pub fallback: bool,
}

/// One LMA forecast from the end of `history`.
pub fn lma_step(
    history: &[f64],
    tau: usize,
    m: usize,
    min_separation: usize,
) -> Result<LmaForecast> {
    lma_predict(history, history.len(), tau, m, min_separation)
}

/// Like [`lma_step`], but analogues must have their successor inside the
/// first `searchable` samples (the model state at the last refit).
pub(crate) fn lma_predict(
    history: &[f64],
    searchable: usize,
    tau: usize,
    m: usize,
    min_separation: usize,
) -> Result<LmaForecast> {
    if tau == 0 || m == 0 {
        return Err(invalid("LMA needs positive tau and m"));
    }
    let Some(&last) = history.last() else {
        return Err(invalid("LMA needs a non-empty history"));
    };
    let fallback = LmaForecast {
        prediction: last,
        neighbor: None,
        fallback: true,
    };
    let reach = (m - 1) * tau;
    if history.len() < reach + 2 {
        return Ok(fallback);
    }
    let query_start = history.len() - 1 - reach;
    let query: Vec<f64> = (0..m).map(|j| history[query_start + j * tau]).collect();

    // Candidate i needs its successor x[i + reach + 1] inside the searchable prefix.
    let searchable = searchable.min(history.len());
    let Some(limit) = searchable.checked_sub(reach + 1) else {
        return Ok(fallback);
    };
    let mut candidate = vec![0.0; m];
    let mut best: Option<(usize, f64)> = None;
    for i in 0..limit {
        if i.abs_diff(query_start) < min_separation {
            continue;
        }
        for (j, c) in candidate.iter_mut().enumerate() {
            *c = history[i + j * tau];
        }
        let d2 = squared_distance(&candidate, &query);
        if best.is_none_or(|(_, bd)| d2 < bd) {
            best = Some((i, d2));
        }
    }
    Ok(match best {
        Some((i, _)) => LmaForecast {
            prediction: history[i + reach + 1],
            neighbor: Some(i),
            fallback: false,
        },
        None => fallback,
    })
}
