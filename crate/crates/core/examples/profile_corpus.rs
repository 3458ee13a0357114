//! Profiling a small corpus of repeated trials and aggregating per group.
//!
//! Run with `cargo run --release --example profile_corpus`.

use predictability::forecast::MethodKind;
use predictability::pipeline::{aggregate, profile_many, NamedFit, ProfileConfig};
use predictability::signals::{generate, GeneratorSpec, SignalKind, SignalParams};

fn main() -> predictability::Result<()> {
    let mut corpus = Vec::new();
    for kind in [
        SignalKind::Sine,
        SignalKind::Henon,
        SignalKind::Ar1,
        SignalKind::IidUniform,
    ] {
        for trial in 0..3 {
            let params = SignalParams {
                noise: if kind == SignalKind::Sine { 0.02 } else { 0.0 },
                ..Default::default()
            };
            let spec = GeneratorSpec::new(kind, 3_000, trial).with_params(params);
            let series = generate(&spec)?.with_name(format!("{}_{trial}", kind.name()));
            corpus.push(series);
        }
    }

    let config = ProfileConfig {
        refit_interval: 10,
        ..Default::default()
    };
    let results = profile_many(
        &corpus,
        &MethodKind::ALL,
        &NamedFit::reference(),
        &config,
        0,
    )?;
    let mut reports = Vec::new();
    for r in results {
        let mut report = r?;
        report.group = report
            .label
            .rsplit_once('_')
            .map_or(report.label.clone(), |(g, _)| g.to_string());
        reports.push(report);
    }

    for r in reports.iter().filter(|r| r.label.ends_with("_0")) {
        println!(
            "{} (WPE {:.3}, nonstationary {:?})",
            r.label, r.wpe.normalized, r.nonstationary
        );
        for e in &r.methods {
            let score = e.mase.map_or(f64::NAN, |s| s.value);
            let verdict = e.verdict.map_or("-", |v| v.name());
            println!("  {:<12} MASE {score:>8.4}  {verdict}", e.method.name());
        }
    }

    println!(
        "\n{:<22} {:>18} {:>18} {:>18}",
        "group", "WPE", "auto_ar MASE", "lma MASE"
    );
    for row in aggregate(&reports)? {
        let cell = |m: MethodKind| {
            row.mase
                .iter()
                .find(|(k, _)| *k == m)
                .and_then(|(_, s)| *s)
                .map_or("-".to_string(), |s| format!("{:.3} ± {:.3}", s.mean, s.std))
        };
        println!(
            "{:<22} {:>18} {:>18} {:>18}",
            row.group,
            format!("{:.3} ± {:.3}", row.wpe.mean, row.wpe.std),
            cell(MethodKind::AutoAr),
            cell(MethodKind::Lma)
        );
    }
    Ok(())
}
