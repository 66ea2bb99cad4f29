//! Close-only daily price series: validation, CSV I/O, calendar splits and
//! seeded synthetic generators.
//!
//! All generators draw from [`NormalStream`], a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and turned into standard normals with
//! the Box-Muller transform. Output is bit-reproducible for a fixed seed and
//! parameter set.

use std::fs;
use std::io::{Read, Write};
use std::ops::Deref;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// First date stamped on synthetic series unless re-dated.
pub const SYNTH_START: NaiveDate = match NaiveDate::from_ymd_opt(2021, 1, 4) {
    Some(d) => d,
    None => panic!("bad constant"),
};

/// A symbol's daily closes.
///
/// Dates are strictly increasing and every close is finite and strictly
/// positive. There is always at least one observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceSeries {
    symbol: String,
    dates: Vec<NaiveDate>,
    closes: Vec<f64>,
}

impl PriceSeries {
    pub fn new(symbol: impl Into<String>, dates: Vec<NaiveDate>, closes: Vec<f64>) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(Error::LengthMismatch {
                dates: dates.len(),
                closes: closes.len(),
            });
        }
        if dates.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (d, &c) in dates.iter().zip(&closes) {
            if !c.is_finite() {
                return Err(Error::NonFinitePrice(*d));
            }
            if c <= 0.0 {
                return Err(Error::NonPositivePrice { date: *d, value: c });
            }
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::NonIncreasingDates {
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(PriceSeries {
            symbol: symbol.into(),
            dates,
            closes,
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    /// Always false; a series holds at least one observation.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    pub fn with_symbol(mut self, symbol: impl Into<String>) -> Self {
        self.symbol = symbol.into();
        self
    }

    /// Re-stamp the series on consecutive weekdays starting at `start`
    /// (rolled forward to a weekday).
    pub fn with_start(mut self, start: NaiveDate) -> Self {
        self.dates = weekdays_from(start, self.closes.len());
        self
    }

    /// The first `n` observations.
    pub fn head(&self, n: usize) -> Result<PriceSeries> {
        if n == 0 || n > self.len() {
            return Err(Error::param(format!("head({n}) of a series of length {}", self.len())));
        }
        Ok(PriceSeries {
            symbol: self.symbol.clone(),
            dates: self.dates[..n].to_vec(),
            closes: self.closes[..n].to_vec(),
        })
    }

    /// Observations with `from <= date <= to` (either bound optional).
    pub fn between(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<PriceSeries> {
        let lo = from.map_or(0, |d| self.dates.partition_point(|x| *x < d));
        let hi = to.map_or(self.len(), |d| self.dates.partition_point(|x| *x <= d));
        if lo >= hi {
            return Err(Error::EmptyInput);
        }
        Ok(PriceSeries {
            symbol: self.symbol.clone(),
            dates: self.dates[lo..hi].to_vec(),
            closes: self.closes[lo..hi].to_vec(),
        })
    }

    /// Split into observations strictly before `split_date` and the rest.
    pub fn split_at(&self, split_date: NaiveDate) -> Result<(PriceSeries, PriceSeries)> {
        let cut = self.dates.partition_point(|d| *d < split_date);
        if cut == 0 {
            return Err(Error::EmptyFirstPart(split_date));
        }
        if cut == self.len() {
            return Err(Error::EmptySecondPart(split_date));
        }
        let first = PriceSeries {
            symbol: self.symbol.clone(),
            dates: self.dates[..cut].to_vec(),
            closes: self.closes[..cut].to_vec(),
        };
        let second = PriceSeries {
            symbol: self.symbol.clone(),
            dates: self.dates[cut..].to_vec(),
            closes: self.closes[cut..].to_vec(),
        };
        Ok((first, second))
    }
}

/// Free-function form of [`PriceSeries::split_at`].
pub fn split_at(series: &PriceSeries, split_date: NaiveDate) -> Result<(PriceSeries, PriceSeries)> {
    series.split_at(split_date)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    Simple,
    Log,
}

/// Per-period returns, flagged simple or log. All values are finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSequence {
    kind: ReturnKind,
    values: Vec<f64>,
}

impl ReturnSequence {
    pub fn new(kind: ReturnKind, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite return at position {i}")));
        }
        Ok(ReturnSequence { kind, values })
    }

    pub fn kind(&self) -> ReturnKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl Deref for ReturnSequence {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// `ln(close[i+1] / close[i])` for every consecutive pair.
pub fn log_returns(series: &PriceSeries) -> Result<ReturnSequence> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            have: series.len(),
        });
    }
    let values = series.closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    ReturnSequence::new(ReturnKind::Log, values)
}

// ---------------------------------------------------------------------------
// CSV

/// Load `<SYMBOL>.csv`; the symbol is the file stem.
pub fn load_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let symbol = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::param(format!("no file stem in {}", path.display())))?
        .to_string();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(symbol, file)
}

/// Parse `date,close` CSV from any reader.
pub fn read_csv(symbol: impl Into<String>, reader: impl Read) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        None => return Err(Error::EmptyFile),
        Some(h) => h?,
    };
    let fields: Vec<&str> = header.iter().map(str::trim).collect();
    if fields != ["date", "close"] {
        return Err(Error::BadHeader(fields.join(",")));
    }

    let mut dates = Vec::new();
    let mut closes = Vec::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let date = NaiveDate::parse_from_str(rec[0].trim(), "%Y-%m-%d").map_err(|e| Error::MalformedRow {
            line,
            reason: format!("bad date `{}`: {e}", &rec[0]),
        })?;
        let close: f64 = rec[1].trim().parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("non-numeric close `{}`", &rec[1]),
        })?;
        dates.push(date);
        closes.push(close);
    }
    if dates.is_empty() {
        return Err(Error::EmptyFile);
    }
    PriceSeries::new(symbol, dates, closes)
}

/// Serialize as `date,close` with `\n` line endings. Closes use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv_to(series: &PriceSeries, mut out: impl Write) -> std::io::Result<()> {
    let mut buf = String::with_capacity(series.len() * 24 + 11);
    buf.push_str("date,close\n");
    for (d, c) in series.dates.iter().zip(&series.closes) {
        buf.push_str(&format!("{},{}\n", d.format("%Y-%m-%d"), c));
    }
    out.write_all(buf.as_bytes())
}

pub fn write_csv(series: &PriceSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    write_csv_to(series, &mut bytes).map_err(|e| Error::io(path, e))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loaded series and the `(file stem, error)` pairs that failed.
pub type LoadedUniverse = (Vec<PriceSeries>, Vec<(String, Error)>);

/// Every `*.csv` in `dir`, sorted by file name. Files that fail to load are
/// returned alongside the good ones instead of aborting the whole universe.
pub fn load_universe(dir: impl AsRef<Path>) -> Result<LoadedUniverse> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && p.is_file())
        .collect();
    paths.sort();

    let mut good = Vec::new();
    let mut bad = Vec::new();
    for p in paths {
        match load_csv(&p) {
            Ok(s) => good.push(s),
            Err(e) => {
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                log::warn!("skipping {}: {e}", p.display());
                bad.push((name, e));
            }
        }
    }
    Ok((good, bad))
}

// ---------------------------------------------------------------------------
// Synthetic series

/// Standard normal deviates from ChaCha8 via Box-Muller.
///
/// Each pair of uniforms `u1 ∈ (0, 1]`, `u2 ∈ [0, 1)` (53-bit, from
/// `Rng::random::<f64>`) yields `r·cos(2πu2)` then `r·sin(2πu2)` with
/// `r = sqrt(-2 ln u1)`.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Derive the seed for member `index` of a seeded family (SplitMix64 finalizer
/// over `base + index·γ`).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn weekdays_from(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date overflow");
    }
    out
}

fn from_log_prices(symbol: &str, log_prices: Vec<f64>) -> Result<PriceSeries> {
    let closes = log_prices.into_iter().map(f64::exp).collect::<Vec<_>>();
    PriceSeries::new(symbol, weekdays_from(SYNTH_START, closes.len()), closes)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    Ok(())
}

/// Gaussian random walk on log-price: `x_t = x_{t-1} + sigma·z_t`,
/// `close_t = p0·exp(x_t)`, `x_0 = 0`.
pub fn synth_random_walk(n: usize, seed: u64, sigma: f64, p0: f64) -> Result<PriceSeries> {
    check_n(n)?;
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma must be finite and >= 0"));
    }
    if !(p0 > 0.0 && p0.is_finite()) {
        return Err(Error::param("p0 must be finite and > 0"));
    }
    let mut z = NormalStream::new(seed);
    let mut x = 0.0;
    let mut closes = Vec::with_capacity(n);
    closes.push(p0);
    for _ in 1..n {
        x += sigma * z.next_normal();
        closes.push(p0 * x.exp());
    }
    PriceSeries::new("RW", weekdays_from(SYNTH_START, n), closes)
}

/// Discrete Ornstein-Uhlenbeck on log-price:
/// `x_t = x_{t-1} + theta·(mu − x_{t-1}) + sigma·z_t`, `close_t = exp(x_t)`.
pub fn synth_ou(n: usize, seed: u64, theta: f64, mu: f64, sigma: f64, x0: f64) -> Result<PriceSeries> {
    check_n(n)?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) || !mu.is_finite() || !x0.is_finite() {
        return Err(Error::param("sigma must be >= 0; mu and x0 finite"));
    }
    let mut z = NormalStream::new(seed);
    let mut xs = Vec::with_capacity(n);
    let mut x = x0;
    xs.push(x);
    for _ in 1..n {
        x = x + theta * (mu - x) + sigma * z.next_normal();
        xs.push(x);
    }
    from_log_prices("OU", xs)
}

/// Log-price with AR(1) increments: `d_t = phi·d_{t-1} + sigma·z_t`,
/// `x_t = x_{t-1} + d_t`, `d_0 = x_0 = 0`.
pub fn synth_persistent(n: usize, seed: u64, phi: f64, sigma: f64) -> Result<PriceSeries> {
    check_n(n)?;
    if !(0.0..1.0).contains(&phi) {
        return Err(Error::param(format!("phi must lie in [0, 1), got {phi}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma must be finite and >= 0"));
    }
    let mut z = NormalStream::new(seed);
    let mut xs = Vec::with_capacity(n);
    let (mut x, mut d) = (0.0, 0.0);
    xs.push(x);
    for _ in 1..n {
        d = phi * d + sigma * z.next_normal();
        x += d;
        xs.push(x);
    }
    from_log_prices("AR", xs)
}

/// Parameters of [`synth_planted_signal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedSignal {
    pub short_window: usize,
    pub long_window: usize,
    /// The signal region is `d_t > threshold && d_{t-1} > threshold`, where
    /// `d` is the relative moving-average spread `(sma_short − sma_long) / sma_long`.
    pub threshold: f64,
    /// Mean simple next-day return inside the signal region.
    pub drift: f64,
    /// Std of the simple next-day return everywhere.
    pub sigma: f64,
}

impl Default for PlantedSignal {
    fn default() -> Self {
        PlantedSignal {
            short_window: 5,
            long_window: 10,
            threshold: 0.004,
            drift: 0.005,
            sigma: 0.01,
        }
    }
}

/// Regime-switching series whose next-day simple return has mean `drift`
/// while the moving-average state sits in the signal region and mean zero
/// otherwise. Starts at 100.
pub fn synth_planted_signal(n: usize, seed: u64, p: &PlantedSignal) -> Result<PriceSeries> {
    check_n(n)?;
    if p.short_window == 0 || p.short_window >= p.long_window {
        return Err(Error::param("need 0 < short_window < long_window"));
    }
    if !(p.sigma >= 0.0 && p.sigma <= 0.1) || !p.drift.is_finite() || p.drift.abs() >= 0.1 {
        return Err(Error::param("need 0 <= sigma <= 0.1 and |drift| < 0.1"));
    }
    let mut z = NormalStream::new(seed);
    let mut closes = Vec::with_capacity(n);
    closes.push(100.0);
    let mut prev_spread: Option<f64> = None;
    for t in 0..n.saturating_sub(1) {
        let spread = if t + 1 >= p.long_window {
            let s = crate::indicators::window_mean(&closes[t + 1 - p.short_window..=t]);
            let l = crate::indicators::window_mean(&closes[t + 1 - p.long_window..=t]);
            Some((s - l) / l)
        } else {
            None
        };
        let in_signal = matches!((spread, prev_spread), (Some(a), Some(b)) if a > p.threshold && b > p.threshold);
        let mean = if in_signal { p.drift } else { 0.0 };
        let r = mean + p.sigma * z.next_normal();
        closes.push(closes[t] * (1.0 + r));
        prev_spread = spread;
    }
    PriceSeries::new("PLANT", weekdays_from(SYNTH_START, n), closes)
}
