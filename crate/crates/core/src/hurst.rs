//! Rescaled-range (R/S) Hurst exponent estimation and regime classification.
//!
//! The estimator works on log-price increments. For each block size on the
//! grid `8, 16, 32, …` (up to half the number of increments) the increments
//! are cut into non-overlapping blocks, each block's range of cumulative
//! mean-adjusted sums is divided by its population standard deviation, and
//! the block ratios are averaged. The exponent is the OLS slope of
//! `ln(R/S)` against `ln(block size)`, clamped to `[0.01, 0.99]`.

use serde::{Deserialize, Serialize};

use crate::marketdata::{log_returns, PriceSeries};
use crate::{Error, Result};

pub const MIN_BLOCK: usize = 8;
pub const MIN_SERIES_LEN: usize = 65;
pub const H_MIN: f64 = 0.01;
pub const H_MAX: f64 = 0.99;
pub const DEFAULT_BOUNDARY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    /// Clamped exponent, always in `[0.01, 0.99]`.
    pub h: f64,
    /// OLS slope before clamping.
    pub raw_slope: f64,
    pub r_squared: f64,
    pub lags_used: Vec<usize>,
    /// Number of increments analysed.
    pub n_obs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Trending,
    MeanReverting,
}

/// Mean R/S over the non-overlapping blocks of `block_size` that have
/// nonzero variance. A trailing partial block is ignored.
pub fn rs_statistic(increments: &[f64], block_size: usize) -> Result<f64> {
    if block_size < 2 {
        return Err(Error::param(format!("block size must be >= 2, got {block_size}")));
    }
    if increments.len() < block_size {
        return Err(Error::TooShort {
            needed: block_size,
            have: increments.len(),
        });
    }
    let mut total = 0.0;
    let mut used = 0usize;
    for block in increments.chunks_exact(block_size) {
        let n = block.len() as f64;
        let mean = block.iter().sum::<f64>() / n;
        let var = block.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        if var <= 0.0 {
            continue;
        }
        let (mut acc, mut lo, mut hi) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
        for x in block {
            acc += x - mean;
            lo = lo.min(acc);
            hi = hi.max(acc);
        }
        total += (hi - lo) / var.sqrt();
        used += 1;
    }
    if used == 0 {
        return Err(Error::DegenerateBlock);
    }
    Ok(total / used as f64)
}

/// Powers of two from 8 up to `n_obs / 2`.
pub fn lag_grid(n_obs: usize) -> Vec<usize> {
    std::iter::successors(Some(MIN_BLOCK), |b| b.checked_mul(2))
        .take_while(|&b| b <= n_obs / 2)
        .collect()
}

pub fn estimate_hurst(series: &PriceSeries) -> Result<HurstEstimate> {
    if series.len() < MIN_SERIES_LEN {
        return Err(Error::TooShort {
            needed: MIN_SERIES_LEN,
            have: series.len(),
        });
    }
    let increments = log_returns(series)?;
    estimate_from_increments(&increments)
}

/// Same as [`estimate_hurst`] but on increments directly.
pub fn estimate_from_increments(increments: &[f64]) -> Result<HurstEstimate> {
    let n_obs = increments.len();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lags_used = Vec::new();
    for lag in lag_grid(n_obs) {
        match rs_statistic(increments, lag) {
            Ok(rs) if rs > 0.0 => {
                xs.push((lag as f64).ln());
                ys.push(rs.ln());
                lags_used.push(lag);
            }
            Ok(_) | Err(Error::DegenerateBlock) => {}
            Err(e) => return Err(e),
        }
    }
    if lags_used.len() < 3 {
        return Err(Error::TooFewLags(lags_used.len()));
    }
    let (slope, r_squared) = ols(&xs, &ys);
    Ok(HurstEstimate {
        h: slope.clamp(H_MIN, H_MAX),
        raw_slope: slope,
        r_squared,
        lags_used,
        n_obs,
    })
}

/// Slope and R² of the least-squares line through `(xs, ys)`.
fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    };
    (slope, r2)
}

/// `h > boundary` is trending; ties go to mean reversion.
pub fn classify(h: f64, boundary: f64) -> Regime {
    if h > boundary {
        Regime::Trending
    } else {
        Regime::MeanReverting
    }
}
