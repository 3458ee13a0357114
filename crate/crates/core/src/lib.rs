//! Predictability profiling for scalar time series.
//!
//! The crate measures how much predictive structure a signal carries with
//! weighted permutation entropy ([`ordinal`]), forecasts it with four reference
//! strategies under a rolling one-step protocol ([`forecast`]), scores those
//! forecasts with the mean absolute scaled error ([`metrics`]) and compares the
//! two numbers against a fitted WPE-vs-MASE curve to flag forecasters that leave
//! structure unexploited ([`heuristic`]). [`pipeline`] ties the steps together
//! and [`cli`] exposes them on the command line.
//!
//! ```
//! use predictability::prelude::*;
//!
//! let sine = generate(&GeneratorSpec::new(SignalKind::Sine, 2400, 7)).unwrap();
//! let noise = generate(&GeneratorSpec::new(SignalKind::IidUniform, 2400, 7)).unwrap();
//! let structured = persistent_wpe(&sine, 0.01).unwrap();
//! let complex = persistent_wpe(&noise, 0.01).unwrap();
//! assert!(structured.report.normalized < 0.3);
//! assert!(complex.report.normalized > 0.95);
//! ```

pub mod cli;
pub mod embedding;
pub mod error;
pub mod forecast;
pub mod heuristic;
pub mod metrics;
mod neighbors;
pub mod ordinal;
pub mod pipeline;
pub mod series;
pub mod signals;
pub mod trace;

pub use error::{Error, Result};
pub use series::TimeSeries;

pub mod prelude {
    pub use crate::embedding::{
        embed, estimate_delay_params, false_nearest_neighbors, mutual_information_curve,
        select_tau, DelayParams, EmbeddingConfig, FnnConfig,
    };
    pub use crate::error::{Error, Result};
    pub use crate::forecast::{rolling_forecast, ForecastMethod, ForecastRun, ForecastTask};
    pub use crate::heuristic::{classify, fit_points, HeuristicFit, Verdict, WpeMasePoint};
    pub use crate::metrics::{mase, trial_stats, MaseScore};
    pub use crate::ordinal::{
        entropy, ordinal_distribution, ordinal_pattern, permutation_entropy, persistent_wpe,
        EntropyMode, EntropyReport,
    };
    pub use crate::pipeline::{aggregate, profile, ProfileConfig, ProfileReport};
    pub use crate::series::TimeSeries;
    pub use crate::signals::{generate, GeneratorSpec, SignalKind, SignalParams};
}
