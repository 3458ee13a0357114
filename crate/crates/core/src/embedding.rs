//! Delay-coordinate embedding: delay selection from the first minimum of the
//! time-delayed mutual information, dimension selection by false nearest
//! neighbours, and construction of the delay vectors.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::neighbors::KdTree;
use crate::series::{std_dev, TimeSeries};

pub const DEFAULT_BINS: usize = 32;
pub const DEFAULT_MAX_LAG: usize = 100;

/// Lifted gaps below this multiple of the series' standard deviation are
/// treated as rounding noise by the distance-ratio test.
const FNN_GAP_FLOOR: f64 = 1e-9;

/// Delay `tau` and dimension `m` of a delay-coordinate map, with the
/// diagnostic curves that produced them when estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayParams {
    pub tau: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_curve: Option<Vec<(usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fnn_curve: Option<Vec<(usize, f64)>>,
}

impl DelayParams {
    pub fn new(tau: usize, m: usize) -> Result<Self> {
        if tau == 0 || m == 0 {
            return Err(invalid(format!(
                "tau and m must be positive, got tau={tau}, m={m}"
            )));
        }
        Ok(Self {
            tau,
            m,
            tau_curve: None,
            fnn_curve: None,
        })
    }

    /// Samples spanned by one delay vector, `(m − 1)·tau + 1`.
    pub fn span(&self) -> usize {
        (self.m - 1) * self.tau + 1
    }
}

/// Delay vectors `(x_i, x_{i+τ}, …, x_{i+(m−1)τ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSeries {
    coords: Vec<f64>,
    source_index: Vec<usize>,
    params: DelayParams,
}

impl EmbeddedSeries {
    pub fn len(&self) -> usize {
        self.source_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_index.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.params.m
    }

    pub fn point(&self, k: usize) -> &[f64] {
        let m = self.params.m;
        &self.coords[k * m..(k + 1) * m]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.params.m)
    }

    /// 0-based index of the first coordinate of each point in the source series.
    pub fn source_index(&self) -> &[usize] {
        &self.source_index
    }

    pub fn params(&self) -> &DelayParams {
        &self.params
    }
}

pub fn embed(series: &TimeSeries, params: &DelayParams) -> Result<EmbeddedSeries> {
    let x = series.values();
    let span = params.span();
    if x.len() < span {
        return Err(Error::InsufficientData {
            needed: span,
            got: x.len(),
        });
    }
    let count = x.len() - span + 1;
    Ok(EmbeddedSeries {
        coords: delay_vectors(x, params.tau, params.m, count),
        source_index: (0..count).collect(),
        params: params.clone(),
    })
}

fn delay_vectors(x: &[f64], tau: usize, m: usize, count: usize) -> Vec<f64> {
    let mut coords = Vec::with_capacity(count * m);
    for i in 0..count {
        coords.extend((0..m).map(|j| x[i + j * tau]));
    }
    coords
}

/// Time-delayed mutual information in bits, one value per lag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MutualInformationCurve {
    pub points: Vec<(usize, f64)>,
    /// Set when the series is constant and the histogram collapses to one bin.
    pub degenerate: bool,
}

/// Histogram estimate of `I(x_t; x_{t+lag})` with `bins` equal-width bins
/// per axis over the series' range. `lag = 0` gives the binned marginal
/// entropy.
pub fn mutual_information(series: &TimeSeries, lag: usize, bins: usize) -> Result<f64> {
    let x = series.values();
    if bins < 2 {
        return Err(invalid("mutual information needs at least 2 bins"));
    }
    if lag >= x.len() {
        return Err(Error::InsufficientData {
            needed: lag + 1,
            got: x.len(),
        });
    }
    match bin_series(x, bins) {
        Some(labels) => Ok(binned_mi(&labels, lag, bins)),
        None => Ok(0.0),
    }
}

pub fn mutual_information_curve(
    series: &TimeSeries,
    max_lag: usize,
    bins: usize,
) -> Result<MutualInformationCurve> {
    let x = series.values();
    if bins < 2 {
        return Err(invalid("mutual information needs at least 2 bins"));
    }
    if max_lag == 0 {
        return Err(invalid("max_lag must be at least 1"));
    }
    if 2 * max_lag >= x.len() {
        return Err(invalid(format!(
            "max_lag must be below N/2 (N = {}, max_lag = {max_lag})",
            x.len()
        )));
    }
    Ok(match bin_series(x, bins) {
        Some(labels) => MutualInformationCurve {
            points: (1..=max_lag)
                .map(|lag| (lag, binned_mi(&labels, lag, bins)))
                .collect(),
            degenerate: false,
        },
        None => MutualInformationCurve {
            points: (1..=max_lag).map(|lag| (lag, 0.0)).collect(),
            degenerate: true,
        },
    })
}

/// Equal-width bin label of every sample, or `None` for a constant series.
fn bin_series(x: &[f64], bins: usize) -> Option<Vec<usize>> {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let width = hi - lo;
    if width <= 0.0 {
        return None;
    }
    Some(
        x.iter()
            .map(|&v| (((v - lo) / width * bins as f64) as usize).min(bins - 1))
            .collect(),
    )
}

fn binned_mi(labels: &[usize], lag: usize, bins: usize) -> f64 {
    let pairs = labels.len() - lag;
    let mut joint = vec![0u64; bins * bins];
    let mut left = vec![0u64; bins];
    let mut right = vec![0u64; bins];
    for t in 0..pairs {
        let (a, b) = (labels[t], labels[t + lag]);
        joint[a * bins + b] += 1;
        left[a] += 1;
        right[b] += 1;
    }
    let n = pairs as f64;
    let mut mi = 0.0;
    for a in 0..bins {
        for b in 0..bins {
            let c = joint[a * bins + b];
            if c == 0 {
                continue;
            }
            let pxy = c as f64 / n;
            let px = left[a] as f64 / n;
            let py = right[b] as f64 / n;
            mi += pxy * (pxy / (px * py)).log2();
        }
    }
    mi.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TauSelection {
    pub tau: usize,
    /// False when the curve has no interior local minimum and `tau` fell back to 1.
    pub found_minimum: bool,
}

/// First interior local minimum of a mutual-information curve.
pub fn select_tau(curve: &[(usize, f64)]) -> Result<TauSelection> {
    if curve.is_empty() {
        return Err(invalid("cannot select a delay from an empty curve"));
    }
    let found = curve
        .windows(3)
        .find(|w| w[0].1 > w[1].1 && w[1].1 < w[2].1)
        .map(|w| w[1].0);
    Ok(match found {
        Some(tau) => TauSelection {
            tau,
            found_minimum: true,
        },
        None => TauSelection {
            tau: 1,
            found_minimum: false,
        },
    })
}

/// Tolerances for the false-nearest-neighbour test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FnnConfig {
    pub m_max: usize,
    /// Threshold on the ratio of the added-coordinate gap to the neighbour distance.
    pub r_tol: f64,
    /// Threshold on the lifted distance in units of the series' standard deviation.
    pub a_tol: f64,
    /// Fraction of false neighbours below which a dimension is accepted.
    pub threshold: f64,
    /// Minimum temporal separation of neighbour pairs; defaults to `tau`.
    pub min_separation: Option<usize>,
}

impl Default for FnnConfig {
    fn default() -> Self {
        Self {
            m_max: 10,
            r_tol: 15.0,
            a_tol: 2.0,
            threshold: 0.01,
            min_separation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FnnResult {
    pub m: usize,
    pub converged: bool,
    /// `(m, fraction of neighbours found in dimension m that are false in m + 1)`.
    pub curve: Vec<(usize, f64)>,
}

/// Smallest embedding dimension whose nearest neighbours survive lifting to
/// one more dimension.
pub fn false_nearest_neighbors(
    series: &TimeSeries,
    tau: usize,
    config: &FnnConfig,
) -> Result<FnnResult> {
    let x = series.values();
    if tau == 0 || config.m_max == 0 {
        return Err(invalid("tau and m_max must be positive"));
    }
    let needed = (config.m_max - 1) * tau + 50;
    if x.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: x.len(),
        });
    }
    let sigma = std_dev(x);
    let min_sep = config.min_separation.unwrap_or(tau);
    let mut curve = Vec::with_capacity(config.m_max);
    let mut chosen = None;

    for m in 1..=config.m_max {
        let fraction = if sigma == 0.0 {
            0.0
        } else {
            fnn_fraction(x, tau, m, min_sep, sigma, config)
        };
        curve.push((m, fraction));
        if chosen.is_none() && fraction < config.threshold {
            chosen = Some(m);
        }
    }

    Ok(match chosen {
        Some(m) => FnnResult {
            m,
            converged: true,
            curve,
        },
        None => FnnResult {
            m: config.m_max,
            converged: false,
            curve,
        },
    })
}

/// Fraction of false neighbours when lifting dimension `m` to `m + 1`.
pub fn fnn_fraction(
    x: &[f64],
    tau: usize,
    m: usize,
    min_sep: usize,
    sigma: f64,
    config: &FnnConfig,
) -> f64 {
    // Only points whose (m+1)-th coordinate exists take part.
    let count = x.len().saturating_sub(m * tau);
    if count < 2 {
        return 1.0;
    }
    let coords = delay_vectors(x, tau, m, count);
    let tree = KdTree::new(&coords, m);
    let gap_floor = FNN_GAP_FLOOR * sigma;
    let mut tested = 0usize;
    let mut false_count = 0usize;
    for i in 0..count {
        let q = &coords[i * m..(i + 1) * m];
        let Some((j, d2)) = tree.nearest(q, |j| j.abs_diff(i) < min_sep.max(1)) else {
            continue;
        };
        tested += 1;
        let dist = d2.sqrt();
        let gap = (x[i + m * tau] - x[j + m * tau]).abs();
        let lifted = (d2 + gap * gap).sqrt();
        let ratio_false = gap > config.r_tol * dist && gap > gap_floor;
        let size_false = lifted > config.a_tol * sigma;
        if ratio_false || size_false {
            false_count += 1;
        }
    }
    if tested == 0 {
        1.0
    } else {
        false_count as f64 / tested as f64
    }
}

/// Settings for estimating `(tau, m)` from a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub max_lag: usize,
    pub bins: usize,
    pub fnn: FnnConfig,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            max_lag: DEFAULT_MAX_LAG,
            bins: DEFAULT_BINS,
            fnn: FnnConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingEstimate {
    pub params: DelayParams,
    pub tau_found_minimum: bool,
    pub fnn_converged: bool,
    pub mi_degenerate: bool,
    pub warnings: Vec<String>,
}

/// Estimates `tau` from the mutual-information curve and then `m` by false
/// nearest neighbours. `max_lag` and `m_max` are clipped to what the series
/// length allows.
pub fn estimate_delay_params(
    series: &TimeSeries,
    config: &EmbeddingConfig,
) -> Result<EmbeddingEstimate> {
    let n = series.len();
    let max_lag = config.max_lag.min((n - 1) / 2);
    if max_lag == 0 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let mi = mutual_information_curve(series, max_lag, config.bins)?;
    let tau_sel = select_tau(&mi.points)?;
    let tau = tau_sel.tau;

    let mut warnings = Vec::new();
    if mi.degenerate {
        warnings.push("mutual information degenerate: constant series".to_string());
    } else if !tau_sel.found_minimum {
        warnings.push("mutual information has no interior minimum; tau = 1".to_string());
    }

    if n < 50 {
        return Err(Error::InsufficientData { needed: 50, got: n });
    }
    let mut fnn_cfg = config.fnn;
    let affordable = (n - 50) / tau + 1;
    if affordable < fnn_cfg.m_max {
        warnings.push(format!(
            "m_max reduced from {} to {affordable} by series length",
            fnn_cfg.m_max
        ));
        fnn_cfg.m_max = affordable;
    }
    let fnn = false_nearest_neighbors(series, tau, &fnn_cfg)?;
    if !fnn.converged {
        warnings.push(format!(
            "false-neighbour fraction never fell below {}",
            fnn_cfg.threshold
        ));
    }

    Ok(EmbeddingEstimate {
        params: DelayParams {
            tau,
            m: fnn.m,
            tau_curve: Some(mi.points),
            fnn_curve: Some(fnn.curve),
        },
        tau_found_minimum: tau_sel.found_minimum,
        fnn_converged: fnn.converged,
        mi_degenerate: mi.degenerate,
        warnings,
    })
}
