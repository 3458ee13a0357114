//! The four reference forecasters under the rolling one-step protocol, scored by MASE.
//!
//! Run with `cargo run --release --example forecast_methods`.

use predictability::embedding::DelayParams;
use predictability::forecast::{
    rolling_forecast, AutoArConfig, ForecastMethod, ForecastTask, LmaConfig, MethodKind,
};
use predictability::metrics::mase;
use predictability::signals::{generate, GeneratorSpec, SignalKind, SignalParams};

fn main() -> predictability::Result<()> {
    let signals = [
        (
            SignalKind::Sine,
            SignalParams {
                noise: 0.05,
                ..Default::default()
            },
        ),
        (SignalKind::Henon, SignalParams::default()),
        (SignalKind::Ar1, SignalParams::default()),
        (SignalKind::GaussianRandomWalk, SignalParams::default()),
        (SignalKind::IidGaussian, SignalParams::default()),
    ];
    println!(
        "{:<22} {:>12} {:>12} {:>12} {:>12}",
        "signal", "random_walk", "naive", "auto_ar", "lma"
    );
    for (kind, params) in signals {
        let series = generate(&GeneratorSpec::new(kind, 4_000, 9).with_params(params))?;
        print!("{:<22}", kind.name());
        for method in MethodKind::ALL {
            // A refit interval of 10 keeps auto_ar quick; the other methods are cheap anyway.
            let task = ForecastTask::new(series.clone(), ForecastMethod::default_for(method))
                .with_refit_interval(10);
            let run = rolling_forecast(&task)?;
            match mase(&run) {
                Ok(score) => print!(" {:>12.4}", score.value),
                Err(e) => print!(" {:>12}", e.to_string()),
            }
        }
        println!();
    }

    // Explicit configuration: fixed embedding for LMA, forced differencing for auto_ar.
    let logistic = generate(&GeneratorSpec::new(SignalKind::Logistic, 5_000, 2))?;
    let lma = ForecastMethod::Lma(LmaConfig {
        params: Some(DelayParams::new(1, 1)?),
        ..Default::default()
    });
    let run = rolling_forecast(&ForecastTask::new(logistic.clone(), lma))?;
    println!(
        "\nlogistic map, LMA with tau = 1, m = 1: MASE {:.6} over {} steps",
        mase(&run)?.value,
        run.predictions.len()
    );
    let last = run.diagnostics.last().expect("at least one step");
    println!(
        "last step predicted index {} from analogue at {:?}",
        last.index, last.neighbor
    );

    let ar = ForecastMethod::AutoAr(AutoArConfig {
        difference: Some(true),
        ..Default::default()
    });
    let run = rolling_forecast(&ForecastTask::new(logistic, ar).with_refit_interval(25))?;
    println!(
        "logistic map, auto_ar forced to difference: MASE {:.4}",
        mase(&run)?.value
    );
    Ok(())
}
