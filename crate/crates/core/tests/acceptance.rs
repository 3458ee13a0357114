//! Acceptance criteria. Each criterion prints one PASS or FAIL line with the
//! measured values; the process exits non-zero if any criterion fails.
//!
//! `cargo test --test acceptance` runs the suite.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use predictability::embedding::{estimate_delay_params, DelayParams, EmbeddingConfig};
use predictability::forecast::{
    fit_auto_ar, rolling_forecast, AutoArConfig, ForecastMethod, ForecastTask, LmaConfig,
    MethodKind,
};
use predictability::heuristic::{
    classify, curve, fit_points, nonstationarity_flag, HeuristicFit, Verdict, WpeMasePoint,
    DEFAULT_NONSTATIONARITY_TOLERANCE,
};
use predictability::metrics::{mase, mase_from_parts, MaseScore};
use predictability::ordinal::{
    ordinal_distribution, ordinal_pattern, permutation_entropy, EntropyMode, OrdinalPattern,
};
use predictability::signals::{generate, GeneratorSpec, SignalKind, SignalParams};
use predictability::trace::read_trace;
use predictability::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "ordinal oracle equivalence",
            budget: secs(10),
            run: c01_ordinal_oracle,
        },
        Criterion {
            id: 2,
            name: "worked ordinal examples",
            budget: secs(1),
            run: c02_ordinal_examples,
        },
        Criterion {
            id: 3,
            name: "entropy bounds and limits",
            budget: secs(30),
            run: c03_entropy_bounds,
        },
        Criterion {
            id: 4,
            name: "MASE identities",
            budget: secs(5),
            run: c04_mase_identities,
        },
        Criterion {
            id: 5,
            name: "random-walk MASE calibration",
            budget: secs(10),
            run: c05_random_walk_calibration,
        },
        Criterion {
            id: 6,
            name: "LMA exploits structure",
            budget: secs(60),
            run: c06_lma_structure,
        },
        Criterion {
            id: 7,
            name: "no-structure ceiling",
            budget: secs(60),
            run: c07_noise_ceiling,
        },
        Criterion {
            id: 8,
            name: "auto_ar recovery",
            budget: secs(30),
            run: c08_auto_ar_recovery,
        },
        Criterion {
            id: 9,
            name: "embedding parameter sanity",
            budget: secs(120),
            run: c09_embedding,
        },
        Criterion {
            id: 10,
            name: "heuristic fit recovery",
            budget: secs(10),
            run: c10_fit_recovery,
        },
        Criterion {
            id: 11,
            name: "classification spot checks",
            budget: secs(1),
            run: c11_classification,
        },
        Criterion {
            id: 12,
            name: "determinism",
            budget: secs(10),
            run: c12_determinism,
        },
    ];

    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    for c in criteria
        .iter()
        .filter(|c| only.is_empty() || only.contains(&c.id))
    {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|e| Outcome::new(false, format!("panicked: {}", panic_message(&e))));
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let pass = outcome.pass && in_budget;
        let timing = if in_budget {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!(
                "{:.2}s, over the {}s budget",
                elapsed.as_secs_f64(),
                c.budget.as_secs()
            )
        };
        println!(
            "[{}] criterion {:>2} {}: {} ({timing})",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            outcome.detail
        );
        if !pass {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("all acceptance criteria passed");
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}

fn series(kind: SignalKind, length: usize, seed: u64) -> TimeSeries {
    generate(&GeneratorSpec::new(kind, length, seed)).expect("generator")
}

fn run_mase(s: &TimeSeries, method: ForecastMethod) -> f64 {
    let run = rolling_forecast(&ForecastTask::new(s.clone(), method)).expect("forecast");
    mase(&run).expect("mase").value
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Brute force: the pattern is the unique permutation `π` whose positions list
/// the window in (value, position) order.
fn oracle_pattern(w: &[f64]) -> OrdinalPattern {
    let l = w.len();
    let mut perm: Vec<usize> = (0..l).collect();
    loop {
        let sorted = perm.windows(2).all(|p| {
            let (i, j) = (p[0], p[1]);
            w[i] < w[j] || (w[i] == w[j] && i < j)
        });
        if sorted {
            return OrdinalPattern::from_ranks(perm.iter().map(|&p| p as u8 + 1).collect())
                .unwrap();
        }
        if !next_permutation(&mut perm) {
            panic!("no permutation sorts {w:?}");
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn c01_ordinal_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut mismatches = 0;
    for case in 0..1000 {
        let l = 2 + case % 3;
        let n = rng.random_range(l..=200);
        // Every other series draws from a handful of integers to force ties.
        let values: Vec<f64> = if case % 2 == 0 {
            (0..n).map(|_| rng.random_range(-5.0..5.0)).collect()
        } else {
            (0..n).map(|_| rng.random_range(0..4) as f64).collect()
        };
        let s = TimeSeries::new(values.clone()).unwrap();
        let dist = ordinal_distribution(&s, l, EntropyMode::Plain).unwrap();
        let windows = n - l + 1;
        let mut counts = std::collections::BTreeMap::new();
        for w in values.windows(l) {
            *counts.entry(oracle_pattern(w)).or_insert(0usize) += 1;
        }
        let expected: std::collections::BTreeMap<_, f64> = counts
            .into_iter()
            .map(|(p, c)| (p, c as f64 / windows as f64))
            .collect();
        if dist.observed_windows() != windows || *dist.mass() != expected {
            mismatches += 1;
        }
    }
    Outcome::new(
        mismatches == 0,
        format!("{mismatches} of 1000 random series differ from the oracle"),
    )
}

fn c02_ordinal_examples() -> Outcome {
    let a = ordinal_pattern(&[9.0, 1.0, 7.0]).unwrap().to_string();
    let b = ordinal_pattern(&[9.0, 7.0, 1.0]).unwrap().to_string();
    Outcome::new(
        a == "231" && b == "321",
        format!("(9,1,7) -> {a}, (9,7,1) -> {b}"),
    )
}

fn c03_entropy_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut out_of_range = 0;
    for case in 0..50 {
        let n = rng.random_range(10..2000);
        let scale = 10f64.powi(rng.random_range(-6..6));
        let values: Vec<f64> = match case % 5 {
            0 => (0..n)
                .map(|_| rng.random_range(-1.0..1.0) * scale)
                .collect(),
            1 => (0..n).map(|_| rng.random_range(0..3) as f64).collect(),
            2 => (0..n).map(|i| (i as f64 * 0.3).sin() * scale).collect(),
            3 => (0..n).map(|i| if i % 7 == 0 { 1.0 } else { 0.0 }).collect(),
            _ => {
                let mut x = 0.0;
                (0..n)
                    .map(|_| {
                        x += rng.sample::<f64, _>(StandardNormal) * scale;
                        x
                    })
                    .collect()
            }
        };
        let s = TimeSeries::new(values).unwrap();
        for l in 2..=5.min(n) {
            for mode in [EntropyMode::Plain, EntropyMode::Weighted] {
                let r = permutation_entropy(&s, l, mode).unwrap();
                if !(0.0..=1.0).contains(&r.normalized) {
                    out_of_range += 1;
                }
            }
        }
    }

    let mut nonzero_limits = 0;
    let limits = [
        (0..300).map(|i| i as f64 * 0.5 + 3.0).collect::<Vec<_>>(),
        (0..300).map(|i| -(i as f64).powi(3)).collect(),
        vec![2.5; 300],
    ];
    for v in limits {
        let s = TimeSeries::new(v).unwrap();
        for l in 2..=6 {
            for mode in [EntropyMode::Plain, EntropyMode::Weighted] {
                if permutation_entropy(&s, l, mode).unwrap().normalized != 0.0 {
                    nonzero_limits += 1;
                }
            }
        }
    }

    let uniform = series(SignalKind::IidUniform, 100_000, 3);
    let pe_uniform = permutation_entropy(&uniform, 4, EntropyMode::Plain)
        .unwrap()
        .normalized;

    let params = SignalParams {
        low: 0.0,
        high: 1.0,
        noise: 0.01,
        ..Default::default()
    };
    let square =
        generate(&GeneratorSpec::new(SignalKind::SquareWave, 10_000, 5).with_params(params))
            .unwrap();
    let pe_sq = permutation_entropy(&square, 4, EntropyMode::Plain)
        .unwrap()
        .normalized;
    let wpe_sq = permutation_entropy(&square, 4, EntropyMode::Weighted)
        .unwrap()
        .normalized;

    let pass = out_of_range == 0 && nonzero_limits == 0 && pe_uniform >= 0.995 && wpe_sq < pe_sq;
    Outcome::new(
        pass,
        format!(
            "{out_of_range} fuzz values outside [0,1]; {nonzero_limits} nonzero monotone/constant cases; \
             uniform PE(4) = {pe_uniform:.5}; noisy square wave WPE {wpe_sq:.4} vs PE {pe_sq:.4}"
        ),
    )
}

fn c04_mase_identities() -> Outcome {
    let train = [0.0, 1.0, 0.0, 1.0];
    let hand = mase_from_parts(&train, &[1.0, 0.0], &[0.0, 1.0])
        .unwrap()
        .value;
    let perfect = mase_from_parts(&train, &[0.0, 1.0], &[0.0, 1.0])
        .unwrap()
        .value;

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let base: Vec<f64> = (0..400).map(|_| rng.sample(StandardNormal)).collect();
    let base_series = TimeSeries::new(base.clone()).unwrap();
    let reference: Vec<f64> = [ForecastMethod::RandomWalk, ForecastMethod::Naive]
        .into_iter()
        .map(|m| run_mase(&base_series, m))
        .collect();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let alpha = rng.random_range(0.01..100.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let beta = rng.random_range(-1e3..1e3);
        let moved = TimeSeries::new(base.iter().map(|v| alpha * v + beta).collect()).unwrap();
        for (m, r) in [ForecastMethod::RandomWalk, ForecastMethod::Naive]
            .into_iter()
            .zip(&reference)
        {
            worst = worst.max((run_mase(&moved, m) - r).abs() / r);
        }
    }
    let pass = perfect == 0.0 && hand == 1.0 && worst < 1e-9;
    Outcome::new(
        pass,
        format!("perfect = {perfect}, hand example = {hand}, worst relative affine change = {worst:.2e}"),
    )
}

fn c05_random_walk_calibration() -> Outcome {
    let scores: Vec<f64> = (0..10)
        .map(|seed| {
            run_mase(
                &series(SignalKind::IidGaussian, 10_000, seed),
                ForecastMethod::RandomWalk,
            )
        })
        .collect();
    let pass = scores.iter().all(|v| (0.85..=1.15).contains(v));
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        pass,
        format!("random-walk MASE over 10 seeds in [{lo:.4}, {hi:.4}]"),
    )
}

fn c06_lma_structure() -> Outcome {
    let lma = || ForecastMethod::Lma(LmaConfig::default());
    let sine = series(SignalKind::Sine, 10_000, 0);
    let sine_lma = run_mase(&sine, lma());

    let logistic = series(SignalKind::Logistic, 10_000, 0);
    let run = rolling_forecast(&ForecastTask::new(logistic.clone(), lma())).unwrap();
    let logistic_lma = mase(&run).unwrap().value;
    let (tau, m) = run.delay_params.as_ref().map_or((0, 0), |p| (p.tau, p.m));
    let logistic_naive = run_mase(&logistic, ForecastMethod::Naive);

    // Diagnostic only: the same forecaster with the map's own one-dimensional state.
    let known = ForecastMethod::Lma(LmaConfig {
        params: Some(DelayParams::new(1, 1).unwrap()),
        ..Default::default()
    });
    let logistic_known = run_mase(&logistic, known);

    let pass = sine_lma < 0.05 && logistic_lma < 0.2 && logistic_naive > 1.0;
    Outcome::new(
        pass,
        format!(
            "sine LMA {sine_lma:.3e} (< 0.05); logistic LMA {logistic_lma:.4} (< 0.2) with estimated \
             tau = {tau}, m = {m}; logistic naive {logistic_naive:.4} (> 1); \
             [diagnostic: logistic LMA at tau = 1, m = 1 is {logistic_known:.2e}]"
        ),
    )
}

fn c07_noise_ceiling() -> Outcome {
    let mut lma_ratio = Vec::new();
    let mut ar_ratio = Vec::new();
    for seed in 0..5 {
        let s = series(SignalKind::IidGaussian, 10_000, 100 + seed);
        let rw = run_mase(&s, ForecastMethod::RandomWalk);
        lma_ratio.push(run_mase(&s, ForecastMethod::default_for(MethodKind::Lma)) / rw);
        ar_ratio.push(run_mase(&s, ForecastMethod::default_for(MethodKind::AutoAr)) / rw);
    }
    let lma = median(lma_ratio);
    let ar = median(ar_ratio);
    // "Beats by more than 10%" means a MASE below 0.9 times the random walk's.
    let pass = lma >= 0.9 && ar >= 0.9;
    Outcome::new(
        pass,
        format!(
            "median MASE ratio to random walk: lma {lma:.4}, auto_ar {ar:.4} (each must be >= 0.9)"
        ),
    )
}

fn c08_auto_ar_recovery() -> Outcome {
    let cfg = AutoArConfig::default();
    let ar_params = SignalParams {
        ar_coefficient: 0.8,
        ..Default::default()
    };
    let mut stationary = 0;
    let mut coefficient_misses = Vec::new();
    for seed in 0..20 {
        let s = generate(
            &GeneratorSpec::new(SignalKind::Ar1, 2000, seed).with_params(ar_params.clone()),
        )
        .unwrap();
        let fit = fit_auto_ar(s.values(), &cfg).unwrap();
        if !fit.differenced {
            stationary += 1;
        }
        let phi = fit.coefficients.first().copied().unwrap_or(0.0);
        if fit.differenced || (phi - 0.8).abs() > 0.05 {
            coefficient_misses.push(seed);
        }
    }
    let mut differenced = 0;
    for seed in 0..20 {
        let s = series(SignalKind::GaussianRandomWalk, 2000, seed);
        if fit_auto_ar(s.values(), &cfg).unwrap().differenced {
            differenced += 1;
        }
    }
    let pass = stationary >= 19 && coefficient_misses.is_empty() && differenced >= 19;
    Outcome::new(
        pass,
        format!(
            "AR(1): d = 0 in {stationary}/20 seeds, lag-1 coefficient outside 0.8 ± 0.05 for seeds {coefficient_misses:?}; \
             random walk: d = 1 in {differenced}/20 seeds"
        ),
    )
}

// Golden values from the reference computation (seed 0 for both signals).
const SINE_GOLDEN_TAU: usize = 2;
const SINE_GOLDEN_M: usize = 2;
const LORENZ_GOLDEN_TAU: usize = 16;
const LORENZ_GOLDEN_M: usize = 3;

fn c09_embedding() -> Outcome {
    let cfg = EmbeddingConfig::default();
    let sine = estimate_delay_params(&series(SignalKind::Sine, 10_000, 0), &cfg).unwrap();
    let lorenz = estimate_delay_params(&series(SignalKind::LorenzX, 50_000, 0), &cfg).unwrap();
    let (st, sm) = (sine.params.tau, sine.params.m);
    let (lt, lm) = (lorenz.params.tau, lorenz.params.m);
    let matches_golden = (st, sm, lt, lm)
        == (
            SINE_GOLDEN_TAU,
            SINE_GOLDEN_M,
            LORENZ_GOLDEN_TAU,
            LORENZ_GOLDEN_M,
        );
    let pass = st.abs_diff(25) <= 2 && sm == 2 && lm.abs_diff(3) <= 1;
    Outcome::new(
        pass,
        format!(
            "sine tau = {st} (want 25 ± 2), m = {sm} (want 2); Lorenz tau = {lt}, m = {lm} (want 3 ± 1); \
             matches frozen golden values: {matches_golden}"
        ),
    )
}

fn c10_fit_recovery() -> Outcome {
    let truth = HeuristicFit {
        a: 0.1,
        b: 500.0,
        ..HeuristicFit::reference()
    };
    let xs: Vec<f64> = (0..50).map(|i| 0.001 * 1.15f64.powi(i)).collect();
    let clean: Vec<WpeMasePoint> = xs
        .iter()
        .map(|&x| WpeMasePoint::new(x, curve(&truth, x)))
        .collect();
    let fit = fit_points(&clean).unwrap();
    let err_a = (fit.a - 0.1).abs() / 0.1;
    let err_b = (fit.b - 500.0).abs() / 500.0;

    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let noisy: Vec<WpeMasePoint> = xs
        .iter()
        .map(|&x| {
            WpeMasePoint::new(
                x,
                curve(&truth, x) + 0.01 * rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    let noisy_fit = fit_points(&noisy).unwrap();
    let err_noisy_a = (noisy_fit.a - 0.1).abs() / 0.1;

    let shape_ok = [&fit, &noisy_fit].iter().all(|f| {
        let grid: Vec<f64> = (0..=200).map(|i| curve(f, i as f64 * 0.01)).collect();
        curve(f, 0.0) == 0.0 && grid.windows(2).all(|w| w[1] > w[0])
    });

    let published = HeuristicFit {
        a: 7.97e-2,
        b: 1.52e3,
        ..HeuristicFit::reference()
    };
    let spot = curve(&published, 0.050);
    let pass = err_a < 1e-3
        && err_b < 1e-3
        && err_noisy_a < 0.05
        && shape_ok
        && (spot - 0.4995).abs() <= 0.0005
        && (spot - 0.513).abs() <= 0.015;
    Outcome::new(
        pass,
        format!(
            "noiseless relative error a {err_a:.1e}, b {err_b:.1e}; noisy a error {:.2}%; \
             origin and monotone: {shape_ok}; curve(0.050) = {spot:.5}",
            100.0 * err_noisy_a
        ),
    )
}

fn c11_classification() -> Outcome {
    let fit = HeuristicFit::reference();
    let a = classify(&WpeMasePoint::new(0.050, 0.513), &fit);
    let b = classify(&WpeMasePoint::new(0.599, 0.513), &fit);
    let c: Vec<Verdict> = [0.0, 0.5, 1.0]
        .iter()
        .map(|&w| classify(&WpeMasePoint::new(2.370, w), &fit))
        .collect();
    let rw = |value| MaseScore {
        value,
        numerator: value,
        denominator_scale: 1.0,
        n: 2,
        k: 1,
    };
    let dgesdd3 = nonstationarity_flag(&rw(0.707), DEFAULT_NONSTATIONARITY_TOLERANCE);
    let col_major = nonstationarity_flag(&rw(1.001), DEFAULT_NONSTATIONARITY_TOLERANCE);
    let pass = a == Verdict::WellMatched
        && b == Verdict::Underexploited
        && c.iter().all(|v| *v == Verdict::BeyondCap)
        && dgesdd3
        && !col_major;
    Outcome::new(
        pass,
        format!(
            "(0.050, 0.513) -> {a}; (0.599, 0.513) -> {b}; MASE 2.370 -> {}; flag(0.707) = {dgesdd3}, flag(1.001) = {col_major}",
            c.iter().map(|v| v.name()).collect::<Vec<_>>().join("/")
        ),
    )
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_predictability");
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (kind, seed) in [("henon", 1), ("lorenz_x", 2)] {
        let path = dir.path().join(format!("{kind}_{seed}.txt"));
        let status = Command::new(bin)
            .args([
                "gen",
                "--kind",
                kind,
                "--length",
                "2000",
                "--seed",
                &seed.to_string(),
                "--out",
            ])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success(), "gen failed");
        files.push(path);
    }

    let mut round_trip = true;
    for (path, (kind, seed)) in files
        .iter()
        .zip([(SignalKind::Henon, 1), (SignalKind::LorenzX, 2)])
    {
        let read = read_trace(path, None).unwrap();
        let expected = series(kind, 2000, seed);
        round_trip &= read.series.len() == expected.len()
            && read
                .series
                .values()
                .iter()
                .zip(expected.values())
                .all(|(a, b)| a.to_bits() == b.to_bits());
    }

    let profile = |threads: &str| {
        let out = Command::new(bin)
            .arg("profile")
            .args(&files)
            .args(["--json", "--refit-interval", "5"])
            .env("PREDICTABILITY_THREADS", threads)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let first = profile("1");
    let second = profile("1");
    let parallel = profile("0");
    let identical = first == second && first == parallel;
    Outcome::new(
        identical && round_trip,
        format!(
            "profile JSON byte-identical across 3 runs ({} bytes, 1 and auto threads): {identical}; gen round trip bit-exact: {round_trip}",
            first.len()
        ),
    )
}
