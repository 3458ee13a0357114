//! Reference forecasters and the rolling one-step protocol.
//!
//! The first `floor(train_fraction · N)` samples form the initial training
//! signal. Each remaining sample `x_j` is predicted from `x_0 … x_{j−1}`, the
//! observed value (never the prediction) is appended, and the model state is
//! refit every `refit_interval` steps.

mod auto_ar;
mod lma;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use auto_ar::{
    fit_auto_ar, kpss_lag, kpss_level_statistic, ArFit, AutoArConfig, KPSS_CRITICAL_5PCT,
    MIN_HISTORY,
};
pub use lma::{lma_step, LmaConfig, LmaForecast};

use crate::embedding::{estimate_delay_params, DelayParams};
use crate::error::{invalid, Error, Result};
use crate::series::{mean, TimeSeries};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.9;
/// Smallest training prefix; the MASE scale needs two samples.
pub const MIN_TRAIN: usize = 2;

/// Forecast strategy identifiers, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    RandomWalk,
    Naive,
    AutoAr,
    Lma,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] = [
        MethodKind::RandomWalk,
        MethodKind::Naive,
        MethodKind::AutoAr,
        MethodKind::Lma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::RandomWalk => "random_walk",
            MethodKind::Naive => "naive",
            MethodKind::AutoAr => "auto_ar",
            MethodKind::Lma => "lma",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A forecast strategy with its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum ForecastMethod {
    RandomWalk,
    Naive,
    AutoAr(AutoArConfig),
    Lma(LmaConfig),
}

impl ForecastMethod {
    pub fn kind(&self) -> MethodKind {
        match self {
            ForecastMethod::RandomWalk => MethodKind::RandomWalk,
            ForecastMethod::Naive => MethodKind::Naive,
            ForecastMethod::AutoAr(_) => MethodKind::AutoAr,
            ForecastMethod::Lma(_) => MethodKind::Lma,
        }
    }

    /// The method with default settings.
    pub fn default_for(kind: MethodKind) -> Self {
        match kind {
            MethodKind::RandomWalk => ForecastMethod::RandomWalk,
            MethodKind::Naive => ForecastMethod::Naive,
            MethodKind::AutoAr => ForecastMethod::AutoAr(AutoArConfig::default()),
            MethodKind::Lma => ForecastMethod::Lma(LmaConfig::default()),
        }
    }
}

/// `p_i = x_{i−1}`.
pub fn random_walk_step(history: &[f64]) -> Result<f64> {
    history
        .last()
        .copied()
        .ok_or_else(|| invalid("random walk needs a non-empty history"))
}

/// Mean of the whole history.
pub fn naive_step(history: &[f64]) -> Result<f64> {
    if history.is_empty() {
        return Err(invalid("naive forecast needs a non-empty history"));
    }
    Ok(mean(history))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoArForecast {
    pub prediction: f64,
    pub fit: Option<ArFit>,
    /// Set when the history was too short and the naive mean was used.
    pub fallback: bool,
}

/// Fits the automated AR model to `history` and forecasts one step.
pub fn auto_ar_step(history: &[f64], config: &AutoArConfig) -> Result<AutoArForecast> {
    match fit_auto_ar(history, config) {
        Ok(fit) => Ok(AutoArForecast {
            prediction: fit.predict(history),
            fit: Some(fit),
            fallback: false,
        }),
        Err(Error::InsufficientData { .. }) => Ok(AutoArForecast {
            prediction: naive_step(history)?,
            fit: None,
            fallback: true,
        }),
        Err(e) => Err(e),
    }
}

/// A series, a split and a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastTask {
    pub series: TimeSeries,
    pub train_fraction: f64,
    pub method: ForecastMethod,
    pub refit_interval: usize,
}

impl ForecastTask {
    pub fn new(series: TimeSeries, method: ForecastMethod) -> Self {
        Self {
            series,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            method,
            refit_interval: 1,
        }
    }

    pub fn with_train_fraction(mut self, fraction: f64) -> Self {
        self.train_fraction = fraction;
        self
    }

    pub fn with_refit_interval(mut self, interval: usize) -> Self {
        self.refit_interval = interval;
        self
    }

    /// `(n, k)`: training and test lengths.
    pub fn split(&self) -> Result<(usize, usize)> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.refit_interval == 0 {
            return Err(invalid("refit interval must be positive"));
        }
        let len = self.series.len();
        let n = (self.train_fraction * len as f64).floor() as usize;
        if n < MIN_TRAIN {
            return Err(Error::InsufficientData {
                needed: (MIN_TRAIN as f64 / self.train_fraction).ceil() as usize,
                got: len,
            });
        }
        if n >= len {
            return Err(invalid("train fraction leaves no test samples"));
        }
        Ok((n, len - n))
    }
}

/// Per-step model metadata.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct StepDiagnostics {
    /// 0-based index of the predicted sample in the series.
    pub index: usize,
    pub fallback: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ar_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub differenced: Option<bool>,
    /// 0-based start index of the LMA analogue.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighbor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastRun {
    pub method: MethodKind,
    pub predictions: Vec<f64>,
    pub truths: Vec<f64>,
    pub train_prefix: Vec<f64>,
    pub refit_interval: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_params: Option<DelayParams>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub warnings: Vec<String>,
}

impl ForecastRun {
    pub fn fallback_steps(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.fallback).count()
    }
}

enum Model {
    Stateless,
    Mean(f64),
    Ar(Option<ArFit>),
    Lma {
        tau: usize,
        m: usize,
        min_sep: usize,
        searchable: usize,
    },
}

/// Runs the rolling one-step protocol.
pub fn rolling_forecast(task: &ForecastTask) -> Result<ForecastRun> {
    let (n, k) = task.split()?;
    let x = task.series.values();
    let mut warnings = Vec::new();
    let mut delay_params = None;

    let mut model = match &task.method {
        ForecastMethod::RandomWalk => Model::Stateless,
        ForecastMethod::Naive => Model::Mean(0.0),
        ForecastMethod::AutoAr(_) => Model::Ar(None),
        ForecastMethod::Lma(cfg) => {
            let params = match &cfg.params {
                Some(p) => p.clone(),
                None => {
                    let train = TimeSeries::new(x[..n].to_vec())?;
                    match estimate_delay_params(&train, &cfg.embedding) {
                        Ok(est) => {
                            warnings.extend(est.warnings);
                            est.params
                        }
                        Err(e) => {
                            warnings.push(format!(
                                "embedding estimation failed ({e}); using tau = 1, m = 1"
                            ));
                            DelayParams::new(1, 1)?
                        }
                    }
                }
            };
            let min_sep = cfg.min_separation.unwrap_or(params.tau);
            let model = Model::Lma {
                tau: params.tau,
                m: params.m,
                min_sep,
                searchable: 0,
            };
            delay_params = Some(params);
            model
        }
    };

    let mut predictions = Vec::with_capacity(k);
    let mut diagnostics = Vec::with_capacity(k);
    for step in 0..k {
        let j = n + step;
        let history = &x[..j];
        let refit = step % task.refit_interval == 0;
        let mut diag = StepDiagnostics {
            index: j,
            ..Default::default()
        };
        let prediction = match (&mut model, &task.method) {
            (Model::Stateless, _) => random_walk_step(history)?,
            (Model::Mean(mu), _) => {
                if refit {
                    *mu = naive_step(history)?;
                }
                *mu
            }
            (Model::Ar(fit), ForecastMethod::AutoAr(cfg)) => {
                if refit {
                    *fit = fit_auto_ar(history, cfg).ok();
                }
                match fit {
                    Some(f) => {
                        diag.ar_order = Some(f.order);
                        diag.differenced = Some(f.differenced);
                        f.predict(history)
                    }
                    None => {
                        diag.fallback = true;
                        naive_step(history)?
                    }
                }
            }
            (
                Model::Lma {
                    tau,
                    m,
                    min_sep,
                    searchable,
                },
                _,
            ) => {
                if refit {
                    *searchable = j;
                }
                let f = lma::lma_predict(history, *searchable, *tau, *m, *min_sep)?;
                diag.neighbor = f.neighbor;
                diag.fallback = f.fallback;
                f.prediction
            }
            (Model::Ar(_), _) => unreachable!("AR model state only arises from the AR method"),
        };
        predictions.push(prediction);
        diagnostics.push(diag);
    }

    let fallbacks = diagnostics.iter().filter(|d| d.fallback).count();
    if fallbacks > 0 {
        warnings.push(format!("{fallbacks} of {k} steps used a fallback forecast"));
    }

    Ok(ForecastRun {
        method: task.method.kind(),
        predictions,
        truths: x[n..].to_vec(),
        train_prefix: x[..n].to_vec(),
        refit_interval: task.refit_interval,
        delay_params,
        diagnostics,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(v).unwrap()
    }

    #[test]
    fn simple_steps() {
        assert_eq!(random_walk_step(&[5.0, 7.0, 9.0]).unwrap(), 9.0);
        assert_eq!(random_walk_step(&[1.86]).unwrap(), 1.86);
        assert!(random_walk_step(&[]).is_err());
        assert_eq!(naive_step(&[0.0, 1.0, 0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(naive_step(&[2.0, 2.0, 2.0]).unwrap(), 2.0);
        assert!((naive_step(&[9.0, 1.0, 7.0]).unwrap() - 17.0 / 3.0).abs() < 1e-12);
        assert!(naive_step(&[]).is_err());
    }

    #[test]
    fn random_walk_is_out_of_phase_on_alternation() {
        let x: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let run = rolling_forecast(&ForecastTask::new(ts(x), ForecastMethod::RandomWalk)).unwrap();
        for (p, c) in run.predictions.iter().zip(&run.truths) {
            assert_eq!((p - c).abs(), 1.0);
        }
    }

    #[test]
    fn protocol_traces() {
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let run = rolling_forecast(&ForecastTask::new(ts(x), ForecastMethod::RandomWalk)).unwrap();
        assert_eq!(run.predictions, vec![9.0]);
        assert_eq!(run.truths, vec![10.0]);
        assert_eq!(run.train_prefix.len(), 9);

        let x: Vec<f64> = (0..10).map(|i| (i % 2) as f64).collect();
        let run = rolling_forecast(&ForecastTask::new(ts(x), ForecastMethod::Naive)).unwrap();
        assert!((run.predictions[0] - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn split_validation() {
        let s = ts((0..10).map(f64::from).collect());
        assert_eq!(
            ForecastTask::new(s.clone(), ForecastMethod::Naive)
                .split()
                .unwrap(),
            (9, 1)
        );
        assert!(
            ForecastTask::new(ts(vec![1.0, 2.0, 3.0]), ForecastMethod::Naive)
                .with_train_fraction(0.5)
                .split()
                .is_err()
        );
        assert!(ForecastTask::new(s.clone(), ForecastMethod::Naive)
            .with_train_fraction(1.0)
            .split()
            .is_err());
        assert!(ForecastTask::new(s, ForecastMethod::Naive)
            .with_refit_interval(0)
            .split()
            .is_err());
    }

    #[test]
    fn auto_ar_short_history_falls_back() {
        let f = auto_ar_step(&[1.0, 2.0, 3.0], &AutoArConfig::default()).unwrap();
        assert!(f.fallback);
        assert_eq!(f.prediction, 2.0);

        let x: Vec<f64> = (0..15).map(|i| (i as f64).sin()).collect();
        let run = rolling_forecast(&ForecastTask::new(
            ts(x),
            ForecastMethod::AutoAr(AutoArConfig::default()),
        ))
        .unwrap();
        assert!(run.diagnostics.iter().all(|d| d.fallback));
    }

    #[test]
    fn refit_interval_holds_naive_mean() {
        let x: Vec<f64> = (0..40).map(f64::from).collect();
        let task = ForecastTask::new(ts(x.clone()), ForecastMethod::Naive)
            .with_train_fraction(0.5)
            .with_refit_interval(5);
        let run = rolling_forecast(&task).unwrap();
        assert_eq!(run.refit_interval, 5);
        for (s, p) in run.predictions.iter().enumerate() {
            let fitted_at = 20 + (s / 5) * 5;
            assert_eq!(*p, mean(&x[..fitted_at]));
        }
    }

    #[test]
    fn method_names() {
        for k in MethodKind::ALL {
            assert_eq!(MethodKind::parse(k.name()), Some(k));
            assert_eq!(ForecastMethod::default_for(k).kind(), k);
        }
    }
}
