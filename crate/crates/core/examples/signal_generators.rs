//! Seeded synthetic signals and the plain trace format.
//!
//! Run with `cargo run --example signal_generators`.

use predictability::signals::{generate, GeneratorSpec, SignalKind};
use predictability::trace::{read_trace, write_plain_file};

fn main() -> predictability::Result<()> {
    println!(
        "{:<22} {:>10} {:>10} {:>10}  first values",
        "kind", "min", "max", "std"
    );
    for kind in SignalKind::ALL {
        let series = generate(&GeneratorSpec::new(kind, 1_000, 42))?;
        let v = series.values();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{:<22} {lo:>10.4} {hi:>10.4} {:>10.4}  {:.4?}",
            kind.name(),
            series.std_dev(),
            &v[..3]
        );
    }

    let dir = std::env::temp_dir().join("predictability-example");
    std::fs::create_dir_all(&dir).map_err(|source| predictability::Error::Io {
        path: dir.clone(),
        source,
    })?;
    let path = dir.join("henon_42.txt");
    let henon = generate(&GeneratorSpec::new(SignalKind::Henon, 500, 42))?;
    write_plain_file(&henon, &["henon map, seed 42".to_string()], &path)?;
    let back = read_trace(&path, None)?;
    let exact = back.series.values() == henon.values();
    println!(
        "\nwrote {} and read it back; bit-identical: {exact}",
        path.display()
    );
    Ok(())
}
