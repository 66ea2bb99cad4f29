//! Long/flat signal generation and execution.
//!
//! Momentum enters on a golden cross of the short over the long simple moving
//! average and exits on the death cross. Mean reversion enters when the close
//! breaks below the lower Bollinger band and exits when it crosses back above
//! the middle band. Fills happen at the signal day's close; an open position
//! is closed at the final bar.

use serde::{Deserialize, Serialize};

use crate::indicators::{bollinger, sma, BandParams, DEFAULT_LONG_WINDOW, DEFAULT_SHORT_WINDOW};
use crate::marketdata::{PriceSeries, ReturnKind, ReturnSequence};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signal {
    None,
    Enter,
    Exit,
}

/// One marker per bar; markers before `valid_from` are always `Signal::None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalSeries {
    markers: Vec<Signal>,
    valid_from: usize,
}

impl SignalSeries {
    pub fn new(markers: Vec<Signal>, valid_from: usize) -> Result<Self> {
        if markers[..valid_from.min(markers.len())].iter().any(|m| *m != Signal::None) {
            return Err(Error::param("signal marker before valid_from"));
        }
        Ok(SignalSeries { markers, valid_from })
    }

    /// All-`None` markers for a series of length `len`.
    pub fn empty(len: usize) -> Self {
        SignalSeries {
            markers: vec![Signal::None; len],
            valid_from: 0,
        }
    }

    pub fn markers(&self) -> &[Signal] {
        &self.markers
    }

    pub fn valid_from(&self) -> usize {
        self.valid_from
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn count(&self, s: Signal) -> usize {
        self.markers.iter().filter(|m| **m == s).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentumParams {
    pub short_window: usize,
    pub long_window: usize,
}

impl Default for MomentumParams {
    fn default() -> Self {
        MomentumParams {
            short_window: DEFAULT_SHORT_WINDOW,
            long_window: DEFAULT_LONG_WINDOW,
        }
    }
}

impl MomentumParams {
    pub fn validate(&self) -> Result<()> {
        if self.short_window == 0 || self.short_window >= self.long_window {
            return Err(Error::param(format!(
                "need 0 < short_window < long_window, got {} / {}",
                self.short_window, self.long_window
            )));
        }
        Ok(())
    }
}

pub fn momentum_signals(series: &PriceSeries, params: MomentumParams) -> Result<SignalSeries> {
    params.validate()?;
    let closes = series.closes();
    let short = sma(closes, params.short_window)?;
    let long = sma(closes, params.long_window)?;
    let start = long.valid_from();
    let mut markers = vec![Signal::None; closes.len()];
    for (i, m) in markers.iter_mut().enumerate().skip(start + 1) {
        let (s0, l0) = (short.get(i - 1).unwrap(), long.get(i - 1).unwrap());
        let (s1, l1) = (short.get(i).unwrap(), long.get(i).unwrap());
        if s0 <= l0 && s1 > l1 {
            *m = Signal::Enter;
        } else if s0 >= l0 && s1 < l1 {
            *m = Signal::Exit;
        }
    }
    Ok(SignalSeries {
        markers,
        valid_from: start,
    })
}

pub fn meanrev_signals(series: &PriceSeries, params: BandParams) -> Result<SignalSeries> {
    let closes = series.closes();
    let bands = bollinger(closes, params)?;
    let start = bands.middle.valid_from();
    let mut markers = vec![Signal::None; closes.len()];
    for i in start..closes.len() {
        let lower = bands.lower.get(i).unwrap();
        let broke_below = closes[i] < lower && (i == start || closes[i - 1] >= bands.lower.get(i - 1).unwrap());
        if broke_below {
            markers[i] = Signal::Enter;
        } else if i > start {
            let (m0, m1) = (bands.middle.get(i - 1).unwrap(), bands.middle.get(i).unwrap());
            if closes[i - 1] <= m0 && closes[i] > m1 {
                markers[i] = Signal::Exit;
            }
        }
    }
    Ok(SignalSeries {
        markers,
        valid_from: start,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub entry_index: usize,
    pub exit_index: usize,
    pub entry_price: f64,
    pub exit_price: f64,
    pub trade_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestResult {
    pub trades: Vec<TradeRecord>,
    /// One point per bar, starting at 1.0.
    pub equity_curve: Vec<f64>,
    pub final_return: f64,
}

impl BacktestResult {
    pub fn n_trades(&self) -> usize {
        self.trades.len()
    }
}

/// All-in long/flat execution at the signal day's close, no costs.
///
/// `Enter` while long and `Exit` while flat are ignored. An `Enter` on the
/// final bar is ignored since no later bar can close it.
pub fn run_backtest(series: &PriceSeries, signals: &SignalSeries) -> Result<BacktestResult> {
    let closes = series.closes();
    if signals.len() != closes.len() {
        return Err(Error::Misaligned {
            signals: signals.len(),
            prices: closes.len(),
        });
    }
    let last = closes.len() - 1;
    let mut trades = Vec::new();
    let mut equity_curve = Vec::with_capacity(closes.len());
    let mut equity = 1.0;
    // (entry index, equity at entry)
    let mut open: Option<(usize, f64)> = None;

    for (i, &px) in closes.iter().enumerate() {
        if let Some((entry, eq0)) = open {
            equity = eq0 * (px / closes[entry]);
            let exit_now = signals.markers[i] == Signal::Exit || i == last;
            if exit_now {
                let trade_return = px / closes[entry] - 1.0;
                equity = eq0 * (1.0 + trade_return);
                trades.push(TradeRecord {
                    entry_index: entry,
                    exit_index: i,
                    entry_price: closes[entry],
                    exit_price: px,
                    trade_return,
                });
                open = None;
            }
        } else if signals.markers[i] == Signal::Enter && i < last {
            open = Some((i, equity));
        }
        equity_curve.push(equity);
    }
    Ok(BacktestResult {
        trades,
        final_return: equity - 1.0,
        equity_curve,
    })
}

pub fn per_trade_returns(result: &BacktestResult) -> ReturnSequence {
    ReturnSequence::new(ReturnKind::Simple, result.trades.iter().map(|t| t.trade_return).collect())
        .expect("trade returns of positive prices are finite")
}
