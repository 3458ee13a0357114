//! Ordinal patterns, permutation entropy and the persistent word-length search.
//!
//! Run with `cargo run --example ordinal_entropy`.

use predictability::ordinal::{
    ordinal_distribution, ordinal_pattern, permutation_entropy, persistent_wpe, select_word_length,
    EntropyMode,
};
use predictability::signals::{generate, GeneratorSpec, SignalKind, SignalParams};

fn main() -> predictability::Result<()> {
    for window in [[9.0, 1.0, 7.0], [9.0, 7.0, 1.0], [2.0, 2.0, 1.0]] {
        println!("{window:?} -> {}", ordinal_pattern(&window)?);
    }

    let logistic = generate(&GeneratorSpec::new(SignalKind::Logistic, 20_000, 1))?;
    let dist = ordinal_distribution(&logistic, 3, EntropyMode::Plain)?;
    println!(
        "\nlogistic map, word length 3, {} windows:",
        dist.observed_windows()
    );
    for (pattern, p) in dist.mass() {
        println!("  {pattern}  {p:.4}");
    }

    let choice = select_word_length(logistic.len(), 100, 3, 8)?;
    println!(
        "\nword length supported by N = {}: {}",
        logistic.len(),
        choice.word_length
    );

    // A noisy square wave: plain PE counts the noise flicker on the plateaus,
    // the weighted form discounts those low-variance windows.
    let params = SignalParams {
        noise: 0.01,
        ..Default::default()
    };
    let square =
        generate(&GeneratorSpec::new(SignalKind::SquareWave, 10_000, 3).with_params(params))?;
    let pe = permutation_entropy(&square, 4, EntropyMode::Plain)?;
    let wpe = permutation_entropy(&square, 4, EntropyMode::Weighted)?;
    println!(
        "\nnoisy square wave at word length 4: PE {:.4}, WPE {:.4}",
        pe.normalized, wpe.normalized
    );

    println!("\npersistent WPE:");
    for kind in [
        SignalKind::Sine,
        SignalKind::Logistic,
        SignalKind::LorenzX,
        SignalKind::IidUniform,
    ] {
        let series = generate(&GeneratorSpec::new(kind, 20_000, 5))?;
        let p = persistent_wpe(&series, 0.01)?;
        let trail: Vec<String> = p.curve.iter().map(|(l, v)| format!("{l}:{v:.3}")).collect();
        println!(
            "  {:<12} {:.4} at word length {} (converged {}) [{}]",
            kind.name(),
            p.report.normalized,
            p.word_length,
            p.converged,
            trail.join(" ")
        );
    }
    Ok(())
}
