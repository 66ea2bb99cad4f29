//! Hurst-gated strategy selection across a universe of symbols.
//!
//! Each symbol is classified on the part of its history before the split
//! date and both strategies are traded on the part from the split date on.
//! [`gated_return`] then picks the mean-reversion return when `h <= boundary`
//! and the momentum return otherwise; [`sweep`] repeats that for every
//! boundary on a grid.

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backtest::{meanrev_signals, momentum_signals, per_trade_returns, run_backtest, MomentumParams};
use crate::hurst::{classify, estimate_hurst, Regime};
use crate::indicators::BandParams;
use crate::marketdata::PriceSeries;
use crate::stats::{summary, SummaryStats};
use crate::{Error, Result};

pub const DEFAULT_SPLIT: NaiveDate = match NaiveDate::from_ymd_opt(2021, 7, 1) {
    Some(d) => d,
    None => panic!("bad constant"),
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolRow {
    pub symbol: String,
    /// Hurst exponent of the first part.
    pub h: f64,
    /// Final return of each strategy over the second part.
    pub r_momentum: f64,
    pub r_meanrev: f64,
    pub trades_momentum: usize,
    pub trades_meanrev: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniverseConfig {
    pub split_date: NaiveDate,
    pub momentum: MomentumParams,
    pub bands: BandParams,
}

impl Default for UniverseConfig {
    fn default() -> Self {
        UniverseConfig {
            split_date: DEFAULT_SPLIT,
            momentum: MomentumParams::default(),
            bands: BandParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub symbol: String,
    pub reason: String,
}

/// Output of [`run_universe`]. Rows keep the universe's input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniverseRun {
    pub rows: Vec<SymbolRow>,
    pub skipped: Vec<Skipped>,
    /// Every closed trade's return, pooled across symbols in row order.
    pub momentum_trades: Vec<f64>,
    pub meanrev_trades: Vec<f64>,
}

impl UniverseRun {
    pub fn zero_trade_counts(&self) -> (usize, usize) {
        (
            self.rows.iter().filter(|r| r.trades_momentum == 0).count(),
            self.rows.iter().filter(|r| r.trades_meanrev == 0).count(),
        )
    }
}

struct SymbolOutcome {
    row: SymbolRow,
    momentum_trades: Vec<f64>,
    meanrev_trades: Vec<f64>,
}

fn run_symbol(series: &PriceSeries, cfg: &UniverseConfig) -> Result<SymbolOutcome> {
    let (first, second) = series.split_at(cfg.split_date)?;
    let est = estimate_hurst(&first)?;
    let mom = run_backtest(&second, &momentum_signals(&second, cfg.momentum)?)?;
    let mr = run_backtest(&second, &meanrev_signals(&second, cfg.bands)?)?;
    Ok(SymbolOutcome {
        row: SymbolRow {
            symbol: series.symbol().to_string(),
            h: est.h,
            r_momentum: mom.final_return,
            r_meanrev: mr.final_return,
            trades_momentum: mom.n_trades(),
            trades_meanrev: mr.n_trades(),
        },
        momentum_trades: per_trade_returns(&mom).into_values(),
        meanrev_trades: per_trade_returns(&mr).into_values(),
    })
}

/// Classify and backtest every symbol in parallel. Symbols that fail any
/// precondition are reported in `skipped`; only an empty result is an error.
pub fn run_universe(universe: &[PriceSeries], cfg: &UniverseConfig) -> Result<UniverseRun> {
    cfg.momentum.validate()?;
    let outcomes: Vec<_> = universe.par_iter().map(|s| (s.symbol(), run_symbol(s, cfg))).collect();

    let mut run = UniverseRun {
        rows: Vec::new(),
        skipped: Vec::new(),
        momentum_trades: Vec::new(),
        meanrev_trades: Vec::new(),
    };
    for (symbol, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                run.rows.push(o.row);
                run.momentum_trades.extend(o.momentum_trades);
                run.meanrev_trades.extend(o.meanrev_trades);
            }
            Err(e) => {
                log::warn!("skipping {symbol}: {e}");
                run.skipped.push(Skipped {
                    symbol: symbol.to_string(),
                    reason: e.to_string(),
                });
            }
        }
    }
    if run.rows.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    Ok(run)
}

pub fn gated_return(row: &SymbolRow, boundary: f64) -> f64 {
    match classify(row.h, boundary) {
        Regime::MeanReverting => row.r_meanrev,
        Regime::Trending => row.r_momentum,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub boundary: f64,
    pub stats: SummaryStats,
}

/// `0, 1/k, 2/k, …, 1` with `k = round(1 / step)`.
pub fn default_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::param(format!("grid step must lie in (0, 1], got {step}")));
    }
    let k = (1.0 / step).round() as usize;
    if ((k as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!("grid step {step} does not divide [0, 1] evenly")));
    }
    Ok((0..=k).map(|i| i as f64 / k as f64).collect())
}

pub fn summarize_gated(rows: &[SymbolRow], boundary: f64) -> Result<SummaryStats> {
    let gated: Vec<f64> = rows.iter().map(|r| gated_return(r, boundary)).collect();
    summary(&gated)
}

pub fn sweep(rows: &[SymbolRow], grid: &[f64]) -> Result<Vec<SweepPoint>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::param("grid values must lie in [0, 1]"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("grid must be strictly increasing"));
    }
    grid.par_iter()
        .map(|&boundary| {
            Ok(SweepPoint {
                boundary,
                stats: summarize_gated(rows, boundary)?,
            })
        })
        .collect()
}
