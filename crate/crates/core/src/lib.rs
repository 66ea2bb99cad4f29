//! Regime-gated backtesting toolkit.
//!
//! Price series are classified as trending or mean-reverting with a
//! rescaled-range Hurst estimate, each symbol is routed to a moving-average
//! crossover (momentum) or Bollinger-band (mean reversion) strategy, and the
//! routing boundary can be swept across `[0, 1]`. A tabular Q-learning agent
//! over a discretized moving-average state space lives in [`qlearn`].
//!
//! ```
//! use regimekit::hurst::{classify, estimate_hurst, Regime};
//! use regimekit::marketdata::synth_ou;
//!
//! let series = synth_ou(2048, 7, 0.3, 0.0, 0.02, 0.0).unwrap();
//! let est = estimate_hurst(&series).unwrap();
//! assert_eq!(classify(est.h, 0.5), Regime::MeanReverting);
//! ```

pub mod backtest;
pub mod error;
pub mod hurst;
pub mod indicators;
pub mod marketdata;
pub mod qlearn;
pub mod selector;
pub mod stats;

pub use error::{Error, Result};
pub use marketdata::{PriceSeries, ReturnKind, ReturnSequence};

/// Version tag embedded in every report and serialized table.
pub const FORMAT_VERSION: &str = "regimekit/1";
