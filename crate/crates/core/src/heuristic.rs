//! The WPE-vs-MASE heuristic.
//!
//! Best-achievable forecast error grows with the entropy of a signal along a
//! curve `wpe = a·log2(b·mase + 1)` that passes through the origin. Fitting
//! that curve to a corpus of (MASE, WPE) points and widening it by one
//! standard deviation on each parameter gives a band of "well matched"
//! forecasts. A point below the band (or right of it) has more structure than
//! its forecaster used.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::MaseScore;

/// Published curve coefficients.
pub const REFERENCE_A: f64 = 7.97e-2;
pub const REFERENCE_B: f64 = 1.52e3;
/// Band half-widths shipped with the reference fit.
pub const REFERENCE_SIGMA_A: f64 = 0.01;
pub const REFERENCE_SIGMA_B: f64 = 300.0;

pub const DEFAULT_MASE_CAP: f64 = 1.0;
pub const DEFAULT_NONSTATIONARITY_TOLERANCE: f64 = 0.15;

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpeMasePoint {
    pub mase: f64,
    pub wpe: f64,
    #[serde(default)]
    pub label: String,
}

impl WpeMasePoint {
    pub fn new(mase: f64, wpe: f64) -> Self {
        Self {
            mase,
            wpe,
            label: String::new(),
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn default_log_base() -> f64 {
    2.0
}

fn default_cap() -> f64 {
    DEFAULT_MASE_CAP
}

/// Fitted curve parameters with one-sigma uncertainties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicFit {
    pub a: f64,
    pub b: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    #[serde(default = "default_log_base")]
    pub log_base: f64,
    #[serde(default = "default_cap")]
    pub mase_cap: f64,
    /// Euclidean norm of the fit residuals; absent for fits not produced by
    /// [`fit_points`].
    #[serde(default)]
    pub residual_norm: Option<f64>,
}

impl HeuristicFit {
    /// Published coefficients with the shipped band widths.
    pub fn reference() -> Self {
        Self {
            a: REFERENCE_A,
            b: REFERENCE_B,
            sigma_a: REFERENCE_SIGMA_A,
            sigma_b: REFERENCE_SIGMA_B,
            log_base: 2.0,
            mase_cap: DEFAULT_MASE_CAP,
            residual_norm: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.a,
            self.b,
            self.sigma_a,
            self.sigma_b,
            self.log_base,
            self.mase_cap,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || self.a <= 0.0 || self.b <= 0.0 {
            return Err(invalid("fit needs finite a, b > 0"));
        }
        if self.sigma_a < 0.0 || self.sigma_b < 0.0 || self.mase_cap <= 0.0 {
            return Err(invalid("fit needs sigma_a, sigma_b ≥ 0 and mase_cap > 0"));
        }
        if self.log_base <= 1.0 {
            return Err(invalid("log base must exceed 1"));
        }
        Ok(())
    }
}

fn log_in(base: f64, v: f64) -> f64 {
    if base == 2.0 {
        v.log2()
    } else {
        v.ln() / base.ln()
    }
}

fn eval(a: f64, b: f64, base: f64, x: f64) -> f64 {
    a * log_in(base, b * x + 1.0)
}

/// `a·log(b·x + 1)` in the fit's log base.
pub fn curve(fit: &HeuristicFit, mase: f64) -> f64 {
    eval(fit.a, fit.b, fit.log_base, mase)
}

/// Pointwise envelope of the four curves `(a ± σ_a, b ± σ_b)`.
pub fn band(fit: &HeuristicFit, mase: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in [fit.a - fit.sigma_a, fit.a + fit.sigma_a] {
        for b in [fit.b - fit.sigma_b, fit.b + fit.sigma_b] {
            let y = eval(a, b.max(0.0), fit.log_base, mase);
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    WellMatched,
    BetterThanBand,
    Underexploited,
    BeyondCap,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::WellMatched => "well_matched",
            Verdict::BetterThanBand => "better_than_band",
            Verdict::Underexploited => "underexploited",
            Verdict::BeyondCap => "beyond_cap",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify(point: &WpeMasePoint, fit: &HeuristicFit) -> Verdict {
    if point.mase > fit.mase_cap {
        return Verdict::BeyondCap;
    }
    let (lo, hi) = band(fit, point.mase);
    if point.wpe < lo {
        Verdict::Underexploited
    } else if point.wpe > hi {
        Verdict::BetterThanBand
    } else {
        Verdict::WellMatched
    }
}

/// True when a random-walk MASE strays from 1 by more than `tolerance`.
pub fn nonstationarity_flag(rw: &MaseScore, tolerance: f64) -> bool {
    (rw.value - 1.0).abs() > tolerance
}

/// Sum of squared residuals `Σ (wpe_i − a·log(b·mase_i + 1))²`.
pub fn objective(points: &[WpeMasePoint], a: f64, b: f64, base: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let r = p.wpe - eval(a, b, base, p.mase);
            r * r
        })
        .sum()
}

/// Analytic gradient of [`objective`] with respect to `(a, b)`.
pub fn objective_gradient(points: &[WpeMasePoint], a: f64, b: f64, base: f64) -> [f64; 2] {
    let ln_base = base.ln();
    let mut g = [0.0; 2];
    for p in points {
        let r = p.wpe - eval(a, b, base, p.mase);
        let (da, db) = model_jacobian(a, b, ln_base, p.mase);
        g[0] -= 2.0 * r * da;
        g[1] -= 2.0 * r * db;
    }
    g
}

/// Partial derivatives of `a·log(b·x + 1)` with respect to `a` and `b`.
fn model_jacobian(a: f64, b: f64, ln_base: f64, x: f64) -> (f64, f64) {
    let u = b * x + 1.0;
    (u.ln() / ln_base, a * x / (u * ln_base))
}

/// Least-squares fit of the log curve by damped Gauss–Newton, started from the
/// best point of a log-spaced grid over `b ∈ [1, 10^5]` (with `a` solved in
/// closed form at each grid `b`).
pub fn fit_points(points: &[WpeMasePoint]) -> Result<HeuristicFit> {
    if points.len() < 3 {
        return Err(Error::FitDegenerate(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for p in points {
        if !p.mase.is_finite() || !p.wpe.is_finite() || p.mase < 0.0 {
            return Err(invalid(format!(
                "point ({}, {}) must be finite with mase ≥ 0",
                p.mase, p.wpe
            )));
        }
    }
    let all_equal = |f: fn(&WpeMasePoint) -> f64| points.iter().all(|p| f(p) == f(&points[0]));
    if all_equal(|p| p.mase) {
        return Err(Error::FitDegenerate("all MASE values are equal".into()));
    }
    if all_equal(|p| p.wpe) {
        return Err(Error::FitDegenerate("all WPE values are equal".into()));
    }

    let base: f64 = 2.0;
    let ln_base = base.ln();

    // Grid seed.
    let mut seed: Option<(f64, f64, f64)> = None;
    for i in 0..=100 {
        let b = 10f64.powf(5.0 * i as f64 / 100.0);
        let (mut num, mut den) = (0.0, 0.0);
        for p in points {
            let g = log_in(base, b * p.mase + 1.0);
            num += p.wpe * g;
            den += g * g;
        }
        if den <= 0.0 {
            continue;
        }
        let a = num / den;
        if a <= 0.0 {
            continue;
        }
        let obj = objective(points, a, b, base);
        if seed.is_none_or(|(_, _, best)| obj < best) {
            seed = Some((a, b, obj));
        }
    }
    let Some((mut a, mut b, mut obj)) = seed else {
        return Err(Error::FitDegenerate(
            "no positive-slope curve fits the points".into(),
        ));
    };

    for _ in 0..MAX_ITERATIONS {
        let (mut h00, mut h01, mut h11, mut g0, mut g1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for p in points {
            let r = p.wpe - eval(a, b, base, p.mase);
            let (ja, jb) = model_jacobian(a, b, ln_base, p.mase);
            h00 += ja * ja;
            h01 += ja * jb;
            h11 += jb * jb;
            g0 += ja * r;
            g1 += jb * r;
        }
        let det = h00 * h11 - h01 * h01;
        if !(det.is_finite() && det > 0.0) {
            break;
        }
        let da = (h11 * g0 - h01 * g1) / det;
        let db = (h00 * g1 - h01 * g0) / det;

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (na, nb) = (a + t * da, b + t * db);
            if na > 0.0 && nb > 0.0 {
                let nobj = objective(points, na, nb, base);
                if nobj <= obj {
                    a = na;
                    b = nb;
                    obj = nobj;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        let rel = (t * da / a).abs().max((t * db / b).abs());
        if !accepted || rel < STEP_TOLERANCE {
            break;
        }
    }

    // Parameter covariance s²·(JᵀJ)⁻¹ at the solution.
    let (mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0);
    for p in points {
        let (ja, jb) = model_jacobian(a, b, ln_base, p.mase);
        h00 += ja * ja;
        h01 += ja * jb;
        h11 += jb * jb;
    }
    let det = h00 * h11 - h01 * h01;
    let s2 = obj / (points.len() - 2) as f64;
    let (sigma_a, sigma_b) = if det > 0.0 {
        (
            (s2 * h11 / det).max(0.0).sqrt(),
            (s2 * h00 / det).max(0.0).sqrt(),
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    if !sigma_a.is_finite() || !sigma_b.is_finite() {
        return Err(Error::FitDegenerate(
            "parameter covariance is singular".into(),
        ));
    }

    Ok(HeuristicFit {
        a,
        b,
        sigma_a,
        sigma_b,
        log_base: base,
        mase_cap: DEFAULT_MASE_CAP,
        residual_norm: Some(obj.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(a: f64, b: f64, sa: f64, sb: f64) -> HeuristicFit {
        HeuristicFit {
            a,
            b,
            sigma_a: sa,
            sigma_b: sb,
            ..HeuristicFit::reference()
        }
    }

    #[test]
    fn curve_values() {
        let r = HeuristicFit::reference();
        assert_eq!(curve(&r, 0.0), 0.0);
        assert!((curve(&r, 0.05) - 0.0797 * 77f64.log2()).abs() < 1e-12);
        assert!((curve(&r, 0.05) - 0.4995).abs() < 5e-4);
        assert!((curve(&r, 1.0) - 0.843).abs() < 1e-3);
    }

    #[test]
    fn band_values() {
        let f = fit(0.1, 500.0, 0.0, 0.0);
        let (lo, hi) = band(&f, 0.3);
        assert_eq!(lo, curve(&f, 0.3));
        assert_eq!(hi, curve(&f, 0.3));
        assert_eq!(band(&HeuristicFit::reference(), 0.0), (0.0, 0.0));

        let f = fit(0.1, 500.0, 0.01, 0.0);
        let (lo, hi) = band(&f, 1.0);
        assert!((lo - 0.09 * 501f64.log2()).abs() < 1e-12);
        assert!((hi - 0.11 * 501f64.log2()).abs() < 1e-12);
        assert!((lo - 0.807).abs() < 1e-3 && (hi - 0.986).abs() < 1e-3);
    }

    #[test]
    fn classification() {
        let r = HeuristicFit::reference();
        assert_eq!(
            classify(&WpeMasePoint::new(0.050, 0.513), &r),
            Verdict::WellMatched
        );
        assert_eq!(
            classify(&WpeMasePoint::new(0.599, 0.513), &r),
            Verdict::Underexploited
        );
        assert_eq!(
            classify(&WpeMasePoint::new(2.37, 0.9), &r),
            Verdict::BeyondCap
        );
        assert_eq!(
            classify(&WpeMasePoint::new(0.01, 0.9), &r),
            Verdict::BetterThanBand
        );
    }

    #[test]
    fn nonstationarity() {
        let score = |v| MaseScore {
            value: v,
            numerator: v,
            denominator_scale: 1.0,
            n: 10,
            k: 1,
        };
        assert!(!nonstationarity_flag(&score(1.001), 0.15));
        assert!(nonstationarity_flag(&score(0.707), 0.15));
        assert!(!nonstationarity_flag(&score(1.0), 0.15));
    }

    #[test]
    fn noiseless_recovery() {
        let truth = fit(0.1, 500.0, 0.0, 0.0);
        let pts: Vec<_> = [0.01, 0.05, 0.2, 0.5, 1.0]
            .iter()
            .map(|&x| WpeMasePoint::new(x, curve(&truth, x)))
            .collect();
        let f = fit_points(&pts).unwrap();
        assert!((f.a - 0.1).abs() / 0.1 < 1e-3, "a = {}", f.a);
        assert!((f.b - 500.0).abs() / 500.0 < 1e-3, "b = {}", f.b);
        assert!(f.residual_norm.unwrap() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let same_x: Vec<_> = (0..4)
            .map(|i| WpeMasePoint::new(0.5, i as f64 / 4.0))
            .collect();
        assert!(matches!(fit_points(&same_x), Err(Error::FitDegenerate(_))));
        let same_y: Vec<_> = (0..4).map(|i| WpeMasePoint::new(i as f64, 0.5)).collect();
        assert!(matches!(fit_points(&same_y), Err(Error::FitDegenerate(_))));
        assert!(fit_points(&same_y[..2]).is_err());
        let bad = vec![WpeMasePoint::new(f64::NAN, 0.1); 3];
        assert!(fit_points(&bad).is_err());
    }

    #[test]
    fn fit_json_defaults() {
        let f: HeuristicFit =
            serde_json::from_str(r#"{"a": 0.1, "b": 500, "sigma_a": 0.01, "sigma_b": 20}"#)
                .unwrap();
        assert_eq!(f.log_base, 2.0);
        assert_eq!(f.mase_cap, 1.0);
        assert!(f.validate().is_ok());
        assert!(fit(-1.0, 1.0, 0.0, 0.0).validate().is_err());
    }
}
