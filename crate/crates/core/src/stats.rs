//! Summary statistics, histograms and the Sharpe ratio for return samples.
//!
//! [`summary`] sums in ascending value order, so its output depends only on
//! the multiset of inputs: permuting the sample gives bit-identical results.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_RISK_FREE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n − 1). Zero when `n == 1`.
    pub std: f64,
    pub n: usize,
    /// Set when `n < 2` and `std` is therefore not meaningful.
    pub degenerate: bool,
}

pub fn summary(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("summary of non-finite values"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let std = if n < 2 {
        0.0
    } else {
        (sorted.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Ok(SummaryStats {
        mean,
        median,
        std,
        n,
        degenerate: n < 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Values outside the binned range (only possible with an explicit range).
    pub out_of_range: usize,
}

impl HistogramData {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `bin_left,bin_right,count` rows.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        let mut s = String::from("bin_left,bin_right,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", self.bin_edges[i], self.bin_edges[i + 1], c));
        }
        out.write_all(s.as_bytes())
    }
}

/// Equal-width bins over `range` (default `[min, max]`). Bins are left-closed
/// and the last bin is also right-closed.
///
/// A zero-width range is only allowed with a single bin, which is then
/// widened to `[v − 0.5, v + 0.5]` so the edges stay strictly increasing.
pub fn histogram(values: &[f64], bin_count: usize, range: Option<(f64, f64)>) -> Result<HistogramData> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bin_count == 0 {
        return Err(Error::param("bin_count must be at least 1"));
    }
    let (mut lo, mut hi) = match range {
        Some(r) => r,
        None => values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v))),
    };
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::param(format!("invalid histogram range [{lo}, {hi}]")));
    }
    if hi == lo {
        if bin_count > 1 {
            return Err(Error::param("zero-width range with more than one bin"));
        }
        lo -= 0.5;
        hi += 0.5;
    }
    let width = hi - lo;
    let mut bin_edges: Vec<f64> = (0..bin_count).map(|i| lo + width * (i as f64 / bin_count as f64)).collect();
    bin_edges.push(hi);

    let mut counts = vec![0usize; bin_count];
    let mut out_of_range = 0;
    for &v in values {
        if !(v >= lo && v <= hi) {
            out_of_range += 1;
            continue;
        }
        let mut idx = (((v - lo) / width) * bin_count as f64) as usize;
        idx = idx.min(bin_count - 1);
        // correct for rounding in the index estimate
        while idx > 0 && v < bin_edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bin_count && v >= bin_edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    Ok(HistogramData {
        bin_edges,
        counts,
        out_of_range,
    })
}

/// `(mean − risk_free) / std`, no annualization: all three inputs must refer
/// to the same horizon.
pub fn sharpe(mean_return: f64, std_return: f64, risk_free: f64) -> Result<f64> {
    if std_return.is_nan() || std_return <= 0.0 || std_return.is_infinite() {
        return Err(Error::param(format!("sharpe needs std > 0, got {std_return}")));
    }
    Ok((mean_return - risk_free) / std_return)
}
