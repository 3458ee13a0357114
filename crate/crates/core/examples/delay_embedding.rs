//! Delay and dimension estimation by mutual information and false nearest neighbours.
//!
//! Run with `cargo run --release --example delay_embedding`.

use predictability::embedding::{
    embed, estimate_delay_params, false_nearest_neighbors, mutual_information_curve, select_tau,
    EmbeddingConfig, FnnConfig,
};
use predictability::signals::{generate, GeneratorSpec, SignalKind};

fn main() -> predictability::Result<()> {
    let lorenz = generate(&GeneratorSpec::new(SignalKind::LorenzX, 50_000, 0))?;

    let mi = mutual_information_curve(&lorenz, 40, 32)?;
    let tau = select_tau(&mi.points)?;
    println!("Lorenz x: mutual information (bits) by lag");
    for (lag, bits) in mi.points.iter().step_by(4) {
        println!("  {lag:>3} {bits:.4}");
    }
    println!(
        "first minimum at lag {} (found {})",
        tau.tau, tau.found_minimum
    );

    let fnn = false_nearest_neighbors(&lorenz, tau.tau, &FnnConfig::default())?;
    println!("\nfalse-neighbour fraction by dimension");
    for (m, frac) in &fnn.curve {
        println!("  m = {m:>2}  {frac:.5}");
    }
    println!(
        "embedding dimension {} (converged {})",
        fnn.m, fnn.converged
    );

    // The same steps in one call, with the curves kept for inspection.
    let sine = generate(&GeneratorSpec::new(SignalKind::Sine, 10_000, 0))?;
    let est = estimate_delay_params(&sine, &EmbeddingConfig::default())?;
    println!("\nsine: tau = {}, m = {}", est.params.tau, est.params.m);
    for w in &est.warnings {
        println!("  warning: {w}");
    }

    let points = embed(&sine, &est.params)?;
    println!(
        "{} delay vectors of dimension {}; first: {:?}",
        points.len(),
        points.dim(),
        points.point(0)
    );
    Ok(())
}
