//! Rolling-window indicators: simple moving average, population standard
//! deviation and Bollinger bands.
//!
//! Batch functions return an [`IndicatorSeries`] aligned to the input; values
//! inside the warmup (`index < window − 1`) are undefined rather than padded.
//! [`RollingMoments`] is the streaming counterpart.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_SHORT_WINDOW: usize = 5;
pub const DEFAULT_LONG_WINDOW: usize = 10;
pub const DEFAULT_BAND_WINDOW: usize = 20;
pub const DEFAULT_BAND_K: f64 = 2.0;

/// Indicator values aligned to a source series of length `len`, defined for
/// indices `valid_from..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    defined: Vec<f64>,
    valid_from: usize,
}

impl IndicatorSeries {
    pub fn valid_from(&self) -> usize {
        self.valid_from
    }

    /// Length of the aligned source series.
    pub fn len(&self) -> usize {
        self.valid_from + self.defined.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at source index `i`, `None` during warmup or past the end.
    pub fn get(&self, i: usize) -> Option<f64> {
        i.checked_sub(self.valid_from).and_then(|j| self.defined.get(j).copied())
    }

    /// The defined values, starting at `valid_from`.
    pub fn defined(&self) -> &[f64] {
        &self.defined
    }
}

/// Lower, middle and upper bands sharing one alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Bands {
    pub lower: IndicatorSeries,
    pub middle: IndicatorSeries,
    pub upper: IndicatorSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    pub window: usize,
    pub k: f64,
}

impl Default for BandParams {
    fn default() -> Self {
        BandParams {
            window: DEFAULT_BAND_WINDOW,
            k: DEFAULT_BAND_K,
        }
    }
}

/// Arithmetic mean, returning the common value exactly for a constant window.
pub(crate) fn window_mean(w: &[f64]) -> f64 {
    let first = w[0];
    if w.iter().all(|&x| x == first) {
        return first;
    }
    w.iter().sum::<f64>() / w.len() as f64
}

/// Population (divide-by-n) standard deviation; exactly zero for a constant window.
pub(crate) fn window_pop_std(w: &[f64]) -> f64 {
    let first = w[0];
    if w.iter().all(|&x| x == first) {
        return 0.0;
    }
    let m = w.iter().sum::<f64>() / w.len() as f64;
    let ss: f64 = w.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / w.len() as f64).sqrt()
}

fn check_window(window: usize, min: usize, len: usize) -> Result<()> {
    if window < min || window > len {
        return Err(Error::InvalidWindow { window, len });
    }
    Ok(())
}

pub fn sma(values: &[f64], window: usize) -> Result<IndicatorSeries> {
    check_window(window, 1, values.len())?;
    Ok(IndicatorSeries {
        defined: values.windows(window).map(window_mean).collect(),
        valid_from: window - 1,
    })
}

pub fn rolling_std(values: &[f64], window: usize) -> Result<IndicatorSeries> {
    check_window(window, 2, values.len())?;
    Ok(IndicatorSeries {
        defined: values.windows(window).map(window_pop_std).collect(),
        valid_from: window - 1,
    })
}

/// `middle ± k·σ` with `middle = sma(window)` and σ the population std.
pub fn bollinger(values: &[f64], params: BandParams) -> Result<Bands> {
    if !(params.k >= 0.0 && params.k.is_finite()) {
        return Err(Error::param(format!("band k must be finite and >= 0, got {}", params.k)));
    }
    let middle = sma(values, params.window)?;
    let sd = rolling_std(values, params.window)?;
    let (lower, upper): (Vec<f64>, Vec<f64>) = middle
        .defined
        .iter()
        .zip(&sd.defined)
        .map(|(m, s)| (m - params.k * s, m + params.k * s))
        .unzip();
    let valid_from = middle.valid_from;
    Ok(Bands {
        lower: IndicatorSeries { defined: lower, valid_from },
        upper: IndicatorSeries { defined: upper, valid_from },
        middle,
    })
}

/// Sliding-window mean and population variance in amortized O(1) per point.
#[derive(Debug, Clone)]
pub struct RollingMoments {
    window: usize,
    buf: VecDeque<f64>,
    mean: f64,
    m2: f64,
    since_resync: usize,
}

impl RollingMoments {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::param("window must be at least 1"));
        }
        Ok(RollingMoments {
            window,
            buf: VecDeque::with_capacity(window + 1),
            mean: 0.0,
            m2: 0.0,
            since_resync: 0,
        })
    }

    /// Push a value; returns `(mean, population std)` once the window is full.
    pub fn push(&mut self, x: f64) -> Option<(f64, f64)> {
        if self.buf.len() < self.window {
            self.buf.push_back(x);
            let n = self.buf.len() as f64;
            let delta = x - self.mean;
            self.mean += delta / n;
            self.m2 += delta * (x - self.mean);
        } else {
            let old = self.buf.pop_front().expect("full window");
            self.buf.push_back(x);
            let old_mean = self.mean;
            self.mean += (x - old) / self.window as f64;
            self.m2 += (x - old) * (x - self.mean + old - old_mean);
            self.since_resync += 1;
            // rebuild from the buffer once per window to stop rounding drift
            if self.since_resync >= self.window {
                self.since_resync = 0;
                let n = self.window as f64;
                self.mean = self.buf.iter().sum::<f64>() / n;
                self.m2 = self.buf.iter().map(|v| (v - self.mean) * (v - self.mean)).sum();
            }
            if self.m2 < 0.0 {
                self.m2 = 0.0;
            }
        }
        if self.buf.len() == self.window {
            Some((self.mean, (self.m2 / self.window as f64).sqrt()))
        } else {
            None
        }
    }
}
