//! Ordinal patterns, permutation entropy (PE) and weighted permutation
//! entropy (WPE).
//!
//! Windows of length `ℓ` slide over the series with stride one. Each window is
//! mapped to the permutation that lists its positions in ascending value
//! order; equal values are ordered by position, so a constant window maps to
//! the identity pattern. Entropies are in bits and are normalized by
//! `log2(ℓ!)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

/// Largest supported word length. `8! = 40320` patterns.
pub const MAX_WORD_LENGTH: usize = 8;

/// Default average number of windows required per possible pattern.
pub const DEFAULT_COUNTS_PER_ORDINAL: usize = 100;

/// Default convergence tolerance for the persistent entropy search.
pub const DEFAULT_PERSISTENCE_TOLERANCE: f64 = 0.01;

/// The value-ordered permutation of a window, as 1-based window positions.
///
/// `(9, 1, 7)` has pattern `231`: position 2 holds the smallest value,
/// then position 3, then position 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrdinalPattern(Vec<u8>);

impl OrdinalPattern {
    /// Validates that `ranks` is a permutation of `1..=ℓ` with `ℓ ≥ 2`.
    pub fn from_ranks(ranks: Vec<u8>) -> Result<Self> {
        let l = ranks.len();
        if l < 2 {
            return Err(invalid("an ordinal pattern needs at least 2 positions"));
        }
        let mut seen = vec![false; l];
        for &r in &ranks {
            let r = r as usize;
            if r == 0 || r > l || seen[r - 1] {
                return Err(invalid(format!(
                    "{ranks:?} is not a permutation of 1..={l}"
                )));
            }
            seen[r - 1] = true;
        }
        Ok(Self(ranks))
    }

    pub fn ranks(&self) -> &[u8] {
        &self.0
    }

    pub fn word_length(&self) -> usize {
        self.0.len()
    }

    /// Lehmer code of the pattern, in `0..ℓ!`.
    pub fn index(&self) -> usize {
        let zero_based: Vec<u8> = self.0.iter().map(|r| r - 1).collect();
        lehmer_code(&zero_based)
    }

    fn from_index(code: usize, l: usize) -> Self {
        Self(lehmer_decode(code, l).into_iter().map(|r| r + 1).collect())
    }
}

impl fmt::Display for OrdinalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.0 {
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl Serialize for OrdinalPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Whether window contributions are counted or weighted by window variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMode {
    Plain,
    Weighted,
}

/// Computes the ordinal pattern of a window.
pub fn ordinal_pattern(window: &[f64]) -> Result<OrdinalPattern> {
    if window.len() < 2 {
        return Err(invalid(
            "ordinal pattern window must have at least 2 values",
        ));
    }
    if window.len() > u8::MAX as usize {
        return Err(invalid("ordinal pattern window is too long"));
    }
    if window.iter().any(|v| !v.is_finite()) {
        return Err(invalid(
            "ordinal pattern window contains a non-finite value",
        ));
    }
    let mut order: Vec<usize> = (0..window.len()).collect();
    sort_positions(window, &mut order);
    Ok(OrdinalPattern(
        order.into_iter().map(|p| p as u8 + 1).collect(),
    ))
}

/// Stable insertion sort of positions by value; windows are short.
fn sort_positions(window: &[f64], order: &mut [usize]) {
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && window[order[j]] < window[order[j - 1]] {
            order.swap(j, j - 1);
            j -= 1;
        }
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn lehmer_code(perm: &[u8]) -> usize {
    let l = perm.len();
    let mut code = 0;
    for i in 0..l {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        code += smaller * factorial(l - 1 - i);
    }
    code
}

fn lehmer_decode(mut code: usize, l: usize) -> Vec<u8> {
    let mut pool: Vec<u8> = (0..l as u8).collect();
    let mut perm = Vec::with_capacity(l);
    for i in 0..l {
        let f = factorial(l - 1 - i);
        let k = code / f;
        code %= f;
        perm.push(pool.remove(k));
    }
    perm
}

/// `log2(ℓ!)`, the maximum entropy for word length `ℓ`.
pub fn max_entropy_bits(word_length: usize) -> f64 {
    (factorial(word_length) as f64).log2()
}

/// Relative frequencies (or variance-weighted frequencies) of ordinal patterns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrdinalDistribution {
    word_length: usize,
    mode: EntropyMode,
    #[serde(serialize_with = "serialize_mass")]
    mass: BTreeMap<OrdinalPattern, f64>,
    observed_windows: usize,
    degenerate: bool,
}

fn serialize_mass<S: serde::Serializer>(
    mass: &BTreeMap<OrdinalPattern, f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(mass.iter().map(|(k, v)| (k.to_string(), v)))
}

impl OrdinalDistribution {
    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn mode(&self) -> EntropyMode {
        self.mode
    }

    /// Nonzero pattern probabilities, ordered by pattern.
    pub fn mass(&self) -> &BTreeMap<OrdinalPattern, f64> {
        &self.mass
    }

    pub fn probability(&self, pattern: &OrdinalPattern) -> f64 {
        self.mass.get(pattern).copied().unwrap_or(0.0)
    }

    pub fn observed_windows(&self) -> usize {
        self.observed_windows
    }

    /// True for a weighted distribution whose every window has zero weight.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn support_size(&self) -> usize {
        self.mass.len()
    }
}

/// Tallies all `N − ℓ + 1` sliding windows of `series`.
pub fn ordinal_distribution(
    series: &TimeSeries,
    word_length: usize,
    mode: EntropyMode,
) -> Result<OrdinalDistribution> {
    check_word_length(word_length)?;
    let x = series.values();
    if x.len() < word_length {
        return Err(Error::InsufficientData {
            needed: word_length,
            got: x.len(),
        });
    }
    let windows = x.len() - word_length + 1;
    let patterns = factorial(word_length);
    let mut counts = vec![0u64; patterns];
    let mut weights = vec![0.0f64; patterns];
    let mut total_weight = 0.0;
    let mut order: Vec<usize> = Vec::with_capacity(word_length);
    let mut perm: Vec<u8> = Vec::with_capacity(word_length);

    for w in x.windows(word_length) {
        order.clear();
        order.extend(0..word_length);
        sort_positions(w, &mut order);
        perm.clear();
        perm.extend(order.iter().map(|&p| p as u8));
        let code = lehmer_code(&perm);
        match mode {
            EntropyMode::Plain => counts[code] += 1,
            EntropyMode::Weighted => {
                let weight = window_weight(w);
                weights[code] += weight;
                total_weight += weight;
            }
        }
    }

    let mut mass = BTreeMap::new();
    let mut degenerate = false;
    match mode {
        EntropyMode::Plain => {
            for (code, &c) in counts.iter().enumerate() {
                if c > 0 {
                    mass.insert(
                        OrdinalPattern::from_index(code, word_length),
                        c as f64 / windows as f64,
                    );
                }
            }
        }
        EntropyMode::Weighted => {
            if total_weight > 0.0 {
                for (code, &w) in weights.iter().enumerate() {
                    if w > 0.0 {
                        mass.insert(
                            OrdinalPattern::from_index(code, word_length),
                            w / total_weight,
                        );
                    }
                }
            } else {
                degenerate = true;
            }
        }
    }

    Ok(OrdinalDistribution {
        word_length,
        mode,
        mass,
        observed_windows: windows,
        degenerate,
    })
}

/// Population variance of the window.
fn window_weight(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

fn check_word_length(l: usize) -> Result<()> {
    if !(2..=MAX_WORD_LENGTH).contains(&l) {
        return Err(invalid(format!(
            "word length must be in 2..={MAX_WORD_LENGTH}, got {l}"
        )));
    }
    Ok(())
}

/// Shannon entropy of an ordinal distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub word_length: usize,
    pub mode: EntropyMode,
    /// Entropy in bits, in `[0, log2(ℓ!)]`.
    pub raw_entropy: f64,
    /// `raw_entropy / log2(ℓ!)`.
    pub normalized: f64,
    /// `1 − normalized`.
    pub redundancy: f64,
    pub degenerate: bool,
}

pub fn entropy(dist: &OrdinalDistribution) -> EntropyReport {
    let max = max_entropy_bits(dist.word_length);
    let raw = -dist
        .mass
        .values()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>();
    let raw = raw.clamp(0.0, max);
    let normalized = (raw / max).clamp(0.0, 1.0);
    // 1 − n is exact or off by at most half an ulp for n in [0, 1], so the sum
    // rounds back to exactly 1.
    let redundancy = 1.0 - normalized;
    EntropyReport {
        word_length: dist.word_length,
        mode: dist.mode,
        raw_entropy: raw,
        normalized,
        redundancy,
        degenerate: dist.degenerate,
    }
}

/// PE or WPE of a series at a fixed word length.
pub fn permutation_entropy(
    series: &TimeSeries,
    word_length: usize,
    mode: EntropyMode,
) -> Result<EntropyReport> {
    Ok(entropy(&ordinal_distribution(series, word_length, mode)?))
}

/// Outcome of the data-length rule for the word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordLengthChoice {
    pub word_length: usize,
    /// False when even the smallest candidate lacks the requested counts.
    pub sufficient: bool,
}

/// Largest `ℓ` in `[min, max]` with `n ≥ counts_per_ordinal · ℓ!`.
pub fn select_word_length(
    n: usize,
    counts_per_ordinal: usize,
    min: usize,
    max: usize,
) -> Result<WordLengthChoice> {
    check_word_length(min)?;
    check_word_length(max)?;
    if min > max {
        return Err(invalid(format!("word length range {min}..={max} is empty")));
    }
    if n < min {
        return Err(Error::InsufficientData {
            needed: min,
            got: n,
        });
    }
    let best = (min..=max)
        .rev()
        .find(|&l| n >= counts_per_ordinal.saturating_mul(factorial(l)));
    Ok(match best {
        Some(l) => WordLengthChoice {
            word_length: l,
            sufficient: true,
        },
        None => WordLengthChoice {
            word_length: min,
            sufficient: false,
        },
    })
}

/// Result of increasing `ℓ` until the normalized entropy settles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistentEntropy {
    pub word_length: usize,
    pub report: EntropyReport,
    pub converged: bool,
    /// Normalized entropy at every word length evaluated.
    pub curve: Vec<(usize, f64)>,
}

/// Persistent entropy: evaluates `ℓ = 3, 4, …` up to the largest length the
/// data supports and stops at the first `ℓ` whose normalized entropy is
/// within `tolerance` of the previous one.
pub fn persistent_entropy(
    series: &TimeSeries,
    mode: EntropyMode,
    tolerance: f64,
) -> Result<PersistentEntropy> {
    let min = 3;
    let needed = DEFAULT_COUNTS_PER_ORDINAL * factorial(min);
    if series.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: series.len(),
        });
    }
    let top = select_word_length(
        series.len(),
        DEFAULT_COUNTS_PER_ORDINAL,
        min,
        MAX_WORD_LENGTH,
    )?
    .word_length;

    let mut curve = Vec::new();
    let mut last: Option<EntropyReport> = None;
    for l in min..=top {
        let report = permutation_entropy(series, l, mode)?;
        curve.push((l, report.normalized));
        if let Some(prev) = last {
            if (report.normalized - prev.normalized).abs() < tolerance {
                return Ok(PersistentEntropy {
                    word_length: l,
                    report,
                    converged: true,
                    curve,
                });
            }
        }
        last = Some(report);
    }
    let report = last.expect("at least one word length evaluated");
    Ok(PersistentEntropy {
        word_length: report.word_length,
        report,
        converged: false,
        curve,
    })
}

/// Persistent weighted permutation entropy.
pub fn persistent_wpe(series: &TimeSeries, tolerance: f64) -> Result<PersistentEntropy> {
    persistent_entropy(series, EntropyMode::Weighted, tolerance)
}
