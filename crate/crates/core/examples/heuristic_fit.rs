//! Fitting the WPE-vs-MASE curve and classifying forecasts against its band.
//!
//! Run with `cargo run --example heuristic_fit`.

use predictability::heuristic::{band, classify, curve, fit_points, HeuristicFit, WpeMasePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> predictability::Result<()> {
    let truth = HeuristicFit {
        a: 0.1,
        b: 500.0,
        ..HeuristicFit::reference()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let points: Vec<WpeMasePoint> = (0..60)
        .map(|i| {
            let x = 0.002 + 0.03 * i as f64;
            let y = curve(&truth, x) + rng.random_range(-0.01..0.01);
            WpeMasePoint::new(x, y)
        })
        .collect();
    let fit = fit_points(&points)?;
    println!(
        "fitted a = {:.5} ± {:.5}, b = {:.1} ± {:.1}, residual {:.4}",
        fit.a,
        fit.sigma_a,
        fit.b,
        fit.sigma_b,
        fit.residual_norm.unwrap_or(f64::NAN)
    );

    let reference = HeuristicFit::reference();
    println!("\nreference curve a = {}, b = {}", reference.a, reference.b);
    println!("{:>8} {:>8} {:>8} {:>8}", "MASE", "low", "curve", "high");
    for x in [0.01, 0.05, 0.1, 0.3, 0.6, 1.0] {
        let (lo, hi) = band(&reference, x);
        println!("{x:>8.3} {lo:>8.4} {:>8.4} {hi:>8.4}", curve(&reference, x));
    }

    println!();
    for (mase, wpe) in [(0.05, 0.513), (0.599, 0.513), (0.02, 0.9), (2.37, 0.5)] {
        let verdict = classify(&WpeMasePoint::new(mase, wpe), &reference);
        println!("MASE {mase:<6} WPE {wpe:<6} -> {verdict}");
    }
    Ok(())
}
