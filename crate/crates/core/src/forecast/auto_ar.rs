//! Automated linear forecaster: a KPSS level-stationarity test decides on one
//! round of differencing, then AR(p) models fitted by ordinary least squares
//! for `p = 0..=p_max` compete on AICc.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 5% critical value of the KPSS level-stationarity statistic.
pub const KPSS_CRITICAL_5PCT: f64 = 0.463;

/// Shortest history the automated fit accepts.
pub const MIN_HISTORY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutoArConfig {
    pub p_max: usize,
    pub kpss_critical: f64,
    /// Recolor the long-run variance through an AR(1) prewhitening filter
    /// before applying the Bartlett window.
    pub kpss_prewhiten: bool,
    /// Forces the differencing decision instead of testing for it.
    pub difference: Option<bool>,
}

impl Default for AutoArConfig {
    fn default() -> Self {
        Self {
            p_max: 10,
            kpss_critical: KPSS_CRITICAL_5PCT,
            kpss_prewhiten: true,
            difference: None,
        }
    }
}

/// Bartlett bandwidth `floor(4·(L/100)^0.25)`.
pub fn kpss_lag(len: usize) -> usize {
    (4.0 * (len as f64 / 100.0).powf(0.25)).floor() as usize
}

/// KPSS statistic for the null of level stationarity.
///
/// Partial sums of the demeaned series are scaled by a Bartlett-window
/// estimate of the long-run variance with lag [`kpss_lag`]. With
/// `prewhiten`, the demeaned series is first filtered by its fitted AR(1)
/// coefficient (capped at `1 − 1/√L`), the window is applied to the filtered
/// residuals and the result is recolored by `1/(1 − ρ)²`. A series with zero
/// variance returns 0.
pub fn kpss_level_statistic(x: &[f64], prewhiten: bool) -> f64 {
    let len = x.len();
    if len < 3 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / len as f64;
    let e: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let mut partial = 0.0;
    let mut eta = 0.0;
    for v in &e {
        partial += v;
        eta += partial * partial;
    }
    let lag = kpss_lag(len);
    let long_run = if prewhiten {
        let num: f64 = e.windows(2).map(|w| w[1] * w[0]).sum();
        let den: f64 = e[..len - 1].iter().map(|v| v * v).sum();
        let rho = if den > 0.0 { num / den } else { 0.0 };
        let rho = rho.min(1.0 - 1.0 / (len as f64).sqrt());
        let v: Vec<f64> = e.windows(2).map(|w| w[1] - rho * w[0]).collect();
        bartlett_long_run_variance(&v, lag) / ((1.0 - rho) * (1.0 - rho))
    } else {
        bartlett_long_run_variance(&e, lag)
    };
    if long_run <= 0.0 || !long_run.is_finite() {
        return 0.0;
    }
    eta / ((len * len) as f64 * long_run)
}

fn bartlett_long_run_variance(e: &[f64], lag: usize) -> f64 {
    let n = e.len() as f64;
    let autocov = |s: usize| e[s..].iter().zip(e).map(|(a, b)| a * b).sum::<f64>() / n;
    let mut s2 = autocov(0);
    for s in 1..=lag.min(e.len().saturating_sub(1)) {
        s2 += 2.0 * (1.0 - s as f64 / (lag as f64 + 1.0)) * autocov(s);
    }
    s2
}

/// A fitted AR(p) model on the raw or once-differenced history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArFit {
    pub differenced: bool,
    pub kpss_statistic: f64,
    pub order: usize,
    /// Constant term in `y_t = c + Σ φ_j y_{t−j}`, on the working scale.
    pub intercept: f64,
    /// `φ_1 … φ_p`.
    pub coefficients: Vec<f64>,
    pub aicc: f64,
}

impl ArFit {
    /// One-step forecast from the end of `history`, undoing any differencing.
    pub fn predict(&self, history: &[f64]) -> f64 {
        let last = *history.last().expect("non-empty history");
        let needed = self.order + usize::from(self.differenced);
        if history.len() < needed.max(1) {
            return last;
        }
        let working = |back: usize| -> f64 {
            let t = history.len() - back;
            if self.differenced {
                history[t] - history[t - 1]
            } else {
                history[t]
            }
        };
        let mut y = self.intercept;
        for (j, phi) in self.coefficients.iter().enumerate() {
            y += phi * working(j + 1);
        }
        if self.differenced {
            last + y
        } else {
            y
        }
    }
}

/// Runs the differencing test and AICc order search on `history`.
pub fn fit_auto_ar(history: &[f64], config: &AutoArConfig) -> Result<ArFit> {
    if history.len() < MIN_HISTORY {
        return Err(Error::InsufficientData {
            needed: MIN_HISTORY,
            got: history.len(),
        });
    }
    let kpss = kpss_level_statistic(history, config.kpss_prewhiten);
    let differenced = config.difference.unwrap_or(kpss > config.kpss_critical);
    let working: Vec<f64> = if differenced {
        history.windows(2).map(|w| w[1] - w[0]).collect()
    } else {
        history.to_vec()
    };
    let (order, intercept, coefficients, aicc) = select_ar(&working, config.p_max);
    Ok(ArFit {
        differenced,
        kpss_statistic: kpss,
        order,
        intercept,
        coefficients,
        aicc,
    })
}

/// Fits AR(0..=p_max) on a common estimation sample and keeps the lowest AICc.
fn select_ar(y: &[f64], p_max: usize) -> (usize, f64, Vec<f64>, f64) {
    let len = y.len();
    let mean = y.iter().sum::<f64>() / len as f64;
    if y.iter().all(|&v| v == y[0]) {
        return (0, y[0], Vec::new(), f64::NEG_INFINITY);
    }
    // Keep at least three rows per parameter of the largest model.
    let p_max = p_max.min((len - 1) / 4);
    let yc: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let rows = len - p_max;
    let dim = p_max + 1;

    let mut gram = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    let mut z = vec![0.0; dim];
    for t in p_max..len {
        z[0] = 1.0;
        for j in 1..dim {
            z[j] = yc[t - j];
        }
        for a in 0..dim {
            rhs[a] += z[a] * yc[t];
            for b in 0..=a {
                gram[a * dim + b] += z[a] * z[b];
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            gram[b * dim + a] = gram[a * dim + b];
        }
    }

    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for p in 0..=p_max {
        let k = p + 1;
        let sub: Vec<f64> = (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .map(|(a, b)| gram[a * dim + b])
            .collect();
        let Some(beta) = cholesky_solve(&sub, &rhs[..k], k) else {
            continue;
        };
        let mut rss = 0.0;
        for t in p_max..len {
            let mut fit = beta[0];
            for j in 1..k {
                fit += beta[j] * yc[t - j];
            }
            rss += (yc[t] - fit) * (yc[t] - fit);
        }
        let n = rows as f64;
        let params = (p + 2) as f64;
        if n - params - 1.0 <= 0.0 {
            continue;
        }
        let aicc =
            n * (rss / n).ln() + 2.0 * params + 2.0 * params * (params + 1.0) / (n - params - 1.0);
        if best.as_ref().is_none_or(|(_, _, b)| aicc < *b) {
            best = Some((p, beta, aicc));
        }
    }

    let Some((order, beta, aicc)) = best else {
        return (0, mean, Vec::new(), f64::NAN);
    };
    let coefficients = beta[1..].to_vec();
    // Move from the centered scale back to y_t = c + Σ φ_j y_{t−j}.
    let intercept = mean + beta[0] - mean * coefficients.iter().sum::<f64>();
    (order, intercept, coefficients, aicc)
}

/// Solves `A x = b` for symmetric positive-definite `A` (row-major, `k × k`).
/// Returns `None` when `A` is numerically singular.
fn cholesky_solve(a: &[f64], b: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    let scale = (0..k).map(|i| a[i * k + i].abs()).fold(0.0, f64::max);
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                if s <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let s: f64 = (0..i).map(|p| l[i * k + p] * y[p]).sum();
        y[i] = (b[i] - s) / l[i * k + i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|p| l[p * k + i] * x[p]).sum();
        x[i] = (y[i] - s) / l[i * k + i];
    }
    Some(x)
}
