//! End-to-end predictability profile of one or many series.

use serde::{Deserialize, Serialize};

use crate::embedding::DelayParams;
use crate::error::{invalid, Error, Result};
use crate::forecast::{
    rolling_forecast, AutoArConfig, ForecastMethod, ForecastTask, LmaConfig, MethodKind,
    DEFAULT_TRAIN_FRACTION,
};
use crate::heuristic::{
    classify, nonstationarity_flag, HeuristicFit, Verdict, WpeMasePoint,
    DEFAULT_NONSTATIONARITY_TOLERANCE,
};
use crate::metrics::{mase, trial_stats, MaseScore};
use crate::ordinal::{
    permutation_entropy, persistent_entropy, select_word_length, EntropyMode, EntropyReport,
    DEFAULT_COUNTS_PER_ORDINAL, DEFAULT_PERSISTENCE_TOLERANCE, MAX_WORD_LENGTH,
};
use crate::series::TimeSeries;

/// A heuristic fit with the name reports cite it by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: HeuristicFit,
}

impl NamedFit {
    pub fn new(name: impl Into<String>, fit: HeuristicFit) -> Self {
        Self {
            name: name.into(),
            fit,
        }
    }

    /// The shipped reference fit.
    pub fn reference() -> Self {
        Self::new("reference", HeuristicFit::reference())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub train_fraction: f64,
    pub refit_interval: usize,
    /// Fixed word length; the persistent search is used when absent.
    pub word_length: Option<usize>,
    pub entropy_mode: EntropyMode,
    pub persistence_tolerance: f64,
    pub nonstationarity_tolerance: f64,
    pub auto_ar: AutoArConfig,
    pub lma: LmaConfig,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            train_fraction: DEFAULT_TRAIN_FRACTION,
            refit_interval: 1,
            word_length: None,
            entropy_mode: EntropyMode::Weighted,
            persistence_tolerance: DEFAULT_PERSISTENCE_TOLERANCE,
            nonstationarity_tolerance: DEFAULT_NONSTATIONARITY_TOLERANCE,
            auto_ar: AutoArConfig::default(),
            lma: LmaConfig::default(),
        }
    }
}

impl ProfileConfig {
    fn method(&self, kind: MethodKind) -> ForecastMethod {
        match kind {
            MethodKind::RandomWalk => ForecastMethod::RandomWalk,
            MethodKind::Naive => ForecastMethod::Naive,
            MethodKind::AutoAr => ForecastMethod::AutoAr(self.auto_ar),
            MethodKind::Lma => ForecastMethod::Lma(self.lma.clone()),
        }
    }
}

/// One forecaster's score and verdict within a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEntry {
    pub method: MethodKind,
    pub mase: Option<MaseScore>,
    pub verdict: Option<Verdict>,
    pub fallback_steps: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub label: String,
    /// Key used by [`aggregate`]; defaults to the label.
    pub group: String,
    pub length: usize,
    pub wpe: EntropyReport,
    pub wpe_converged: bool,
    pub methods: Vec<MethodEntry>,
    pub delay_params: Option<DelayParams>,
    /// Random-walk MASE strays from 1; absent when that score is unavailable.
    pub nonstationary: Option<bool>,
    pub fit_name: String,
    pub fit: HeuristicFit,
    pub warnings: Vec<String>,
}

impl ProfileReport {
    pub fn entry(&self, method: MethodKind) -> Option<&MethodEntry> {
        self.methods.iter().find(|e| e.method == method)
    }

    pub fn mase(&self, method: MethodKind) -> Option<f64> {
        self.entry(method).and_then(|e| e.mase).map(|s| s.value)
    }
}

/// Entropy of the whole series, persistent unless a word length is fixed.
fn profile_entropy(
    series: &TimeSeries,
    config: &ProfileConfig,
    warnings: &mut Vec<String>,
) -> Result<(EntropyReport, bool)> {
    if let Some(l) = config.word_length {
        return Ok((permutation_entropy(series, l, config.entropy_mode)?, true));
    }
    match persistent_entropy(series, config.entropy_mode, config.persistence_tolerance) {
        Ok(p) => {
            if !p.converged {
                warnings.push(format!(
                    "entropy did not converge by word length {}",
                    p.word_length
                ));
            }
            Ok((p.report, p.converged))
        }
        Err(Error::InsufficientData { .. }) => {
            let choice =
                select_word_length(series.len(), DEFAULT_COUNTS_PER_ORDINAL, 3, MAX_WORD_LENGTH)?;
            warnings.push(format!(
                "series too short for the persistent search; word length {} used",
                choice.word_length
            ));
            Ok((
                permutation_entropy(series, choice.word_length, config.entropy_mode)?,
                false,
            ))
        }
        Err(e) => Err(e),
    }
}

/// Computes WPE, runs each requested forecaster, scores it and classifies it
/// against `fit`. Failures of individual methods become warnings.
pub fn profile(
    series: &TimeSeries,
    methods: &[MethodKind],
    fit: &NamedFit,
    config: &ProfileConfig,
) -> Result<ProfileReport> {
    fit.fit.validate()?;
    let label = series.name().unwrap_or("series").to_string();
    let mut warnings = Vec::new();
    let (wpe, wpe_converged) = profile_entropy(series, config, &mut warnings)?;

    let mut requested: Vec<MethodKind> = Vec::new();
    for &m in methods {
        if !requested.contains(&m) {
            requested.push(m);
        }
    }

    let mut entries = Vec::with_capacity(requested.len());
    let mut delay_params = None;
    for kind in requested {
        let task = ForecastTask::new(series.clone(), config.method(kind))
            .with_train_fraction(config.train_fraction)
            .with_refit_interval(config.refit_interval);
        let mut entry = MethodEntry {
            method: kind,
            mase: None,
            verdict: None,
            fallback_steps: 0,
            warnings: Vec::new(),
        };
        match rolling_forecast(&task) {
            Ok(run) => {
                entry.fallback_steps = run.fallback_steps();
                entry.warnings.extend(run.warnings.iter().cloned());
                if let Some(p) = &run.delay_params {
                    delay_params = Some(DelayParams {
                        tau_curve: None,
                        fnn_curve: None,
                        ..p.clone()
                    });
                }
                match mase(&run) {
                    Ok(score) => {
                        let point = WpeMasePoint::new(score.value, wpe.normalized)
                            .labeled(format!("{label}/{kind}"));
                        entry.verdict = Some(classify(&point, &fit.fit));
                        entry.mase = Some(score);
                    }
                    Err(e) => entry.warnings.push(format!("MASE unavailable: {e}")),
                }
            }
            Err(e) => entry.warnings.push(format!("forecast failed: {e}")),
        }
        entries.push(entry);
    }

    let nonstationary = entries
        .iter()
        .find(|e| e.method == MethodKind::RandomWalk)
        .and_then(|e| e.mase)
        .map(|s| nonstationarity_flag(&s, config.nonstationarity_tolerance));

    Ok(ProfileReport {
        group: label.clone(),
        label,
        length: series.len(),
        wpe,
        wpe_converged,
        methods: entries,
        delay_params,
        nonstationary,
        fit_name: fit.name.clone(),
        fit: fit.fit.clone(),
        warnings,
    })
}

/// Profiles several series on a pool of `threads` workers (0 = automatic).
/// Results keep the input order.
pub fn profile_many(
    series: &[TimeSeries],
    methods: &[MethodKind],
    fit: &NamedFit,
    config: &ProfileConfig,
    threads: usize,
) -> Result<Vec<Result<ProfileReport>>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        series
            .par_iter()
            .map(|s| profile(s, methods, fit, config))
            .collect()
    }))
}

/// Mean and sample standard deviation over the trials of a group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl MeanStd {
    fn of(values: &[f64]) -> Option<Self> {
        trial_stats(values).ok().map(|(mean, std)| Self {
            mean,
            std,
            count: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub trials: usize,
    pub wpe: MeanStd,
    /// One entry per method seen in the group, in reporting order; `None`
    /// when no trial produced a MASE for that method.
    pub mase: Vec<(MethodKind, Option<MeanStd>)>,
}

/// Groups reports by [`ProfileReport::group`] in order of first appearance.
pub fn aggregate(reports: &[ProfileReport]) -> Result<Vec<AggregateRow>> {
    if reports.is_empty() {
        return Err(invalid("nothing to aggregate"));
    }
    let mut groups: Vec<(&str, Vec<&ProfileReport>)> = Vec::new();
    for r in reports {
        match groups.iter_mut().find(|(g, _)| *g == r.group) {
            Some((_, members)) => members.push(r),
            None => groups.push((&r.group, vec![r])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(group, members)| {
            let wpe: Vec<f64> = members.iter().map(|r| r.wpe.normalized).collect();
            let mut methods: Vec<MethodKind> = members
                .iter()
                .flat_map(|r| r.methods.iter().map(|e| e.method))
                .collect();
            methods.sort();
            methods.dedup();
            let mase = methods
                .into_iter()
                .map(|m| {
                    let values: Vec<f64> = members.iter().filter_map(|r| r.mase(m)).collect();
                    (m, MeanStd::of(&values))
                })
                .collect();
            AggregateRow {
                group: group.to_string(),
                trials: members.len(),
                wpe: MeanStd::of(&wpe).expect("groups are non-empty"),
                mase,
            }
        })
        .collect())
}
