//! Tabular Q-learning over a discretized moving-average state space.
//!
//! The feature is the relative spread between the short and long simple
//! moving averages, `d_t = (sma_short[t] − sma_long[t]) / sma_long[t]`. A
//! state is the pair of bins of `(d_t, d_{t−1})`; bin edges are empirical
//! quantiles of the training features. Each day the agent may hold a long or
//! a short position from one close to the next.
//!
//! Because the market does not react to the agent, the reward of the action
//! not taken is known exactly (it is the negation), so the default trainer
//! updates both the `Long` and the `Short` cell every step. An ε-greedy
//! single-action mode is available through [`Exploration::EpsilonGreedy`].
//!
//! Every cell also tracks the count, running mean and sum of squared
//! deviations of its rewards; the restricted policy only trades where the
//! one-sample t-statistic of the chosen action's rewards is significant.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::indicators::{sma, window_mean, IndicatorSeries, DEFAULT_LONG_WINDOW, DEFAULT_SHORT_WINDOW};
use crate::marketdata::PriceSeries;
use crate::{Error, Result, FORMAT_VERSION};

pub const DEFAULT_BINS: usize = 5;
pub const DEFAULT_T_THRESHOLD: f64 = 1.96;
pub const DEFAULT_N_MIN: u64 = 30;

// ---------------------------------------------------------------------------
// State space

/// Unfitted state-space settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateConfig {
    pub short_window: usize,
    pub long_window: usize,
    pub bins_per_dim: usize,
}

impl Default for StateConfig {
    fn default() -> Self {
        StateConfig {
            short_window: DEFAULT_SHORT_WINDOW,
            long_window: DEFAULT_LONG_WINDOW,
            bins_per_dim: DEFAULT_BINS,
        }
    }
}

impl StateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.short_window == 0 || self.short_window >= self.long_window {
            return Err(Error::param("need 0 < short_window < long_window"));
        }
        if self.bins_per_dim == 0 {
            return Err(Error::param("bins_per_dim must be at least 1"));
        }
        Ok(())
    }

    /// First index `t` at which both `d_t` and `d_{t−1}` exist.
    pub fn first_state_index(&self) -> usize {
        self.long_window
    }
}

/// A fitted state space. Both dimensions share one edge set since `d_t` and
/// `d_{t−1}` are the same feature one day apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub short_window: usize,
    pub long_window: usize,
    /// Effective bins per dimension, `edges.len() + 1`.
    pub bins_per_dim: usize,
    /// Strictly increasing.
    pub edges: Vec<f64>,
}

impl StateSpec {
    pub fn new(short_window: usize, long_window: usize, edges: Vec<f64>) -> Result<Self> {
        if short_window == 0 || short_window >= long_window {
            return Err(Error::param("need 0 < short_window < long_window"));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("bin edges must be finite and strictly increasing"));
        }
        Ok(StateSpec {
            short_window,
            long_window,
            bins_per_dim: edges.len() + 1,
            edges,
        })
    }

    pub fn cardinality(&self) -> usize {
        self.bins_per_dim * self.bins_per_dim
    }

    pub fn bin(&self, value: f64) -> usize {
        self.edges.partition_point(|e| *e <= value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId {
    /// Bin of `d_t`.
    pub current: usize,
    /// Bin of `d_{t−1}`.
    pub previous: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TradeAction {
    Long,
    Short,
    Abstain,
}

/// Relative moving-average spread at a single index.
pub fn momentum_feature(series: &PriceSeries, t: usize, short_window: usize, long_window: usize) -> Result<f64> {
    if short_window == 0 || short_window >= long_window {
        return Err(Error::param("need 0 < short_window < long_window"));
    }
    if t + 1 < long_window {
        return Err(Error::Warmup {
            index: t,
            valid_from: long_window - 1,
        });
    }
    let closes = series.closes();
    if t >= closes.len() {
        return Err(Error::param(format!("index {t} beyond series of length {}", closes.len())));
    }
    let s = window_mean(&closes[t + 1 - short_window..=t]);
    let l = window_mean(&closes[t + 1 - long_window..=t]);
    Ok((s - l) / l)
}

/// The feature over a whole series, defined from `long_window − 1`.
pub fn momentum_features(closes: &[f64], short_window: usize, long_window: usize) -> Result<Vec<f64>> {
    let s: IndicatorSeries = sma(closes, short_window)?;
    let l: IndicatorSeries = sma(closes, long_window)?;
    Ok((l.valid_from()..closes.len())
        .map(|i| {
            let lv = l.get(i).unwrap();
            (s.get(i).unwrap() - lv) / lv
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedBins {
    pub requested_bins: usize,
    /// Distinct quantile edges, strictly increasing.
    pub edges: Vec<f64>,
    /// True when duplicate quantiles were merged.
    pub collapsed: bool,
}

/// Edges at the empirical quantiles `k / bins` for `k = 1..bins`, using
/// linear interpolation between order statistics at position `(n − 1)·p`.
pub fn fit_bins(features: &[f64], bins_per_dim: usize) -> Result<FittedBins> {
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins_per_dim == 0 {
        return Err(Error::param("bins_per_dim must be at least 1"));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("non-finite feature"));
    }
    let mut sorted = features.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let raw: Vec<f64> = (1..bins_per_dim)
        .map(|k| {
            let pos = (n - 1) as f64 * (k as f64 / bins_per_dim as f64);
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            if lo + 1 < n {
                sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
            } else {
                sorted[lo]
            }
        })
        .collect();
    let mut edges = raw.clone();
    edges.dedup();
    Ok(FittedBins {
        requested_bins: bins_per_dim,
        collapsed: edges.len() != raw.len(),
        edges,
    })
}

pub fn state_of(d_t: f64, d_prev: f64, spec: &StateSpec) -> StateId {
    StateId {
        current: spec.bin(d_t),
        previous: spec.bin(d_prev),
    }
}

/// Close-to-close simple return from `t` to `t + 1`, signed by the action.
pub fn reward(series: &PriceSeries, t: usize, action: TradeAction) -> Result<f64> {
    let closes = series.closes();
    if t + 1 >= closes.len() {
        return Err(Error::NoNextBar { index: t, len: closes.len() });
    }
    let r = closes[t + 1] / closes[t] - 1.0;
    Ok(match action {
        TradeAction::Long => r,
        TradeAction::Short => -r,
        TradeAction::Abstain => 0.0,
    })
}

// ---------------------------------------------------------------------------
// Q-table

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSize {
    /// `alpha = 1 / (n + 1)` where `n` counts earlier updates of the cell.
    Harmonic,
    Constant { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exploration {
    /// Update both `Long` and `Short` every step.
    BothActions,
    /// Take one action per step: uniformly random with probability
    /// `epsilon`, greedy otherwise. Only the taken action is updated.
    EpsilonGreedy { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub step_size: StepSize,
    pub gamma: f64,
    pub exploration: Exploration,
    pub t_threshold: f64,
    pub n_min: u64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            step_size: StepSize::Harmonic,
            gamma: 0.0,
            exploration: Exploration::BothActions,
            t_threshold: DEFAULT_T_THRESHOLD,
            n_min: DEFAULT_N_MIN,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if let StepSize::Constant { alpha } = self.step_size {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}")));
            }
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::param(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if let Exploration::EpsilonGreedy { epsilon } = self.exploration {
            if !(0.0..=1.0).contains(&epsilon) {
                return Err(Error::param(format!("epsilon must lie in [0, 1], got {epsilon}")));
            }
        }
        if self.t_threshold.is_nan() || self.t_threshold < 0.0 {
            return Err(Error::param("t_threshold must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QCell {
    pub q: f64,
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl QCell {
    /// Sample variance of the observed rewards, `None` below two observations.
    pub fn variance(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.m2 / (self.n - 1) as f64)
    }

    /// One-sample t-statistic of the rewards against zero.
    pub fn t_stat(&self) -> Option<f64> {
        let var = self.variance()?;
        let se = (var / self.n as f64).sqrt();
        let t = self.mean.abs() / se;
        (!t.is_nan()).then_some(t)
    }
}

pub fn q_update(cell: QCell, r: f64, step: StepSize, gamma: f64, max_next_q: f64) -> Result<QCell> {
    let alpha = match step {
        StepSize::Harmonic => 1.0 / (cell.n as f64 + 1.0),
        StepSize::Constant { alpha } if alpha > 0.0 && alpha <= 1.0 => alpha,
        StepSize::Constant { alpha } => return Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}"))),
    };
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::param(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    let target = if gamma == 0.0 { r } else { r + gamma * max_next_q };
    let n = cell.n + 1;
    let delta = r - cell.mean;
    let mean = cell.mean + delta / n as f64;
    Ok(QCell {
        q: cell.q + alpha * (target - cell.q),
        n,
        mean,
        m2: cell.m2 + delta * (r - mean),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    pub spec: StateSpec,
    pub hyper: Hyperparams,
    pub bins_collapsed: bool,
    /// Number of training steps (one per visited state-day).
    pub training_steps: u64,
    /// Earliest and latest date seen in training.
    pub training_span: Option<(NaiveDate, NaiveDate)>,
    cells: BTreeMap<(StateId, TradeAction), QCell>,
}

impl QTable {
    pub fn new(spec: StateSpec, hyper: Hyperparams) -> Self {
        QTable {
            spec,
            hyper,
            bins_collapsed: false,
            training_steps: 0,
            training_span: None,
            cells: BTreeMap::new(),
        }
    }

    pub fn cell(&self, s: StateId, a: TradeAction) -> Option<&QCell> {
        self.cells.get(&(s, a))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(StateId, TradeAction), &QCell)> {
        self.cells.iter()
    }

    fn q(&self, s: StateId, a: TradeAction) -> f64 {
        self.cells.get(&(s, a)).map_or(0.0, |c| c.q)
    }

    fn max_q(&self, s: StateId) -> f64 {
        self.q(s, TradeAction::Long).max(self.q(s, TradeAction::Short))
    }

    fn update(&mut self, s: StateId, a: TradeAction, r: f64, max_next_q: f64) -> Result<()> {
        let cell = self.cells.entry((s, a)).or_default();
        *cell = q_update(*cell, r, self.hyper.step_size, self.hyper.gamma, max_next_q)?;
        Ok(())
    }

    /// Error when `[from, to]` intersects the training span.
    pub fn check_disjoint(&self, from: NaiveDate, to: NaiveDate) -> Result<()> {
        if let Some((ts, te)) = self.training_span {
            if from <= te && to >= ts {
                return Err(Error::OverlappingRanges {
                    train_start: ts,
                    train_end: te,
                    eval_start: from,
                    eval_end: to,
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&QTableDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<QTable> {
        let doc: QTableDoc = serde_json::from_str(s)?;
        doc.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<QTable> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        QTable::from_json(&s)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CellRecord {
    state: [usize; 2],
    action: TradeAction,
    q: f64,
    n: u64,
    mean: f64,
    m2: f64,
    variance: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QTableDoc {
    format: String,
    spec: StateSpec,
    hyperparams: Hyperparams,
    bins_collapsed: bool,
    training_steps: u64,
    training_span: Option<(NaiveDate, NaiveDate)>,
    cells: Vec<CellRecord>,
}

impl From<&QTable> for QTableDoc {
    fn from(t: &QTable) -> Self {
        QTableDoc {
            format: FORMAT_VERSION.to_string(),
            spec: t.spec.clone(),
            hyperparams: t.hyper,
            bins_collapsed: t.bins_collapsed,
            training_steps: t.training_steps,
            training_span: t.training_span,
            cells: t
                .cells
                .iter()
                .map(|((s, a), c)| CellRecord {
                    state: [s.current, s.previous],
                    action: *a,
                    q: c.q,
                    n: c.n,
                    mean: c.mean,
                    m2: c.m2,
                    variance: c.variance(),
                })
                .collect(),
        }
    }
}

impl TryFrom<QTableDoc> for QTable {
    type Error = Error;

    fn try_from(doc: QTableDoc) -> Result<QTable> {
        let spec = StateSpec::new(doc.spec.short_window, doc.spec.long_window, doc.spec.edges)?;
        doc.hyperparams.validate()?;
        let mut cells = BTreeMap::new();
        for c in doc.cells {
            let [current, previous] = c.state;
            if current >= spec.bins_per_dim || previous >= spec.bins_per_dim || c.action == TradeAction::Abstain {
                return Err(Error::param(format!("invalid cell {:?}/{:?}", c.state, c.action)));
            }
            let key = (StateId { current, previous }, c.action);
            let cell = QCell {
                q: c.q,
                n: c.n,
                mean: c.mean,
                m2: c.m2,
            };
            if cells.insert(key, cell).is_some() {
                return Err(Error::param(format!("duplicate cell {:?}/{:?}", c.state, c.action)));
            }
        }
        Ok(QTable {
            spec,
            hyper: doc.hyperparams,
            bins_collapsed: doc.bins_collapsed,
            training_steps: doc.training_steps,
            training_span: doc.training_span,
            cells,
        })
    }
}

// ---------------------------------------------------------------------------
// Training

/// One reward applied to one cell during training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainEvent {
    pub state: StateId,
    pub action: TradeAction,
    pub reward: f64,
}

struct Prepared<'a> {
    series: &'a PriceSeries,
    features: Vec<f64>,
}

/// States of every step `t ∈ [long_window, len − 2]` of a series; index 0 is
/// `t = long_window`. The last entry is the state at `len − 1` (no reward).
fn states_for(features: &[f64], spec: &StateSpec) -> Vec<StateId> {
    // features[0] is d at index long_window − 1
    features.windows(2).map(|w| state_of(w[1], w[0], spec)).collect()
}

pub fn train(universe: &[PriceSeries], cfg: StateConfig, hyper: Hyperparams) -> Result<QTable> {
    train_observed(universe, cfg, hyper, |_| {})
}

/// [`train`], reporting every cell update to `observe` in order.
pub fn train_observed(
    universe: &[PriceSeries],
    cfg: StateConfig,
    hyper: Hyperparams,
    mut observe: impl FnMut(TrainEvent),
) -> Result<QTable> {
    cfg.validate()?;
    hyper.validate()?;
    if universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let min_len = cfg.long_window + 2;
    let mut prepared = Vec::new();
    for s in universe {
        if s.len() < min_len {
            log::warn!("{}: {} bars, need {min_len} for training", s.symbol(), s.len());
            continue;
        }
        prepared.push(Prepared {
            series: s,
            features: momentum_features(s.closes(), cfg.short_window, cfg.long_window)?,
        });
    }
    if prepared.is_empty() {
        return Err(Error::TooShort {
            needed: min_len,
            have: universe.iter().map(PriceSeries::len).max().unwrap_or(0),
        });
    }

    let pooled: Vec<f64> = prepared.iter().flat_map(|p| p.features.iter().copied()).collect();
    let bins = fit_bins(&pooled, cfg.bins_per_dim)?;
    let spec = StateSpec::new(cfg.short_window, cfg.long_window, bins.edges)?;
    let mut table = QTable::new(spec, hyper);
    table.bins_collapsed = bins.collapsed;

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut span: Option<(NaiveDate, NaiveDate)> = None;

    for p in &prepared {
        let closes = p.series.closes();
        let states = states_for(&p.features, &table.spec);
        // states[j] is the state at t = long_window + j; the last state has no reward
        for j in 0..states.len() - 1 {
            let t = cfg.long_window + j;
            let s = states[j];
            let r = closes[t + 1] / closes[t] - 1.0;
            let next = states[j + 1];
            let both = [(TradeAction::Long, r), (TradeAction::Short, -r)];
            let actions: &[(TradeAction, f64)] = match hyper.exploration {
                Exploration::BothActions => &both,
                Exploration::EpsilonGreedy { epsilon } => {
                    let explore = rng.random::<f64>() < epsilon;
                    let a = if explore {
                        if rng.random::<bool>() {
                            TradeAction::Long
                        } else {
                            TradeAction::Short
                        }
                    } else {
                        greedy(&table, s)
                    };
                    if a == TradeAction::Long {
                        &both[..1]
                    } else {
                        &both[1..]
                    }
                }
            };
            // both updates see the same pre-step next-state value
            let max_next = if hyper.gamma > 0.0 { table.max_q(next) } else { 0.0 };
            for &(a, reward) in actions {
                table.update(s, a, reward, max_next)?;
                observe(TrainEvent { state: s, action: a, reward });
            }
            table.training_steps += 1;
        }
        let (a, b) = (p.series.first_date(), p.series.last_date());
        span = Some(match span {
            None => (a, b),
            Some((x, y)) => (x.min(a), y.max(b)),
        });
    }
    table.training_span = span;
    Ok(table)
}

fn greedy(table: &QTable, s: StateId) -> TradeAction {
    if table.q(s, TradeAction::Short) > table.q(s, TradeAction::Long) {
        TradeAction::Short
    } else {
        TradeAction::Long
    }
}

// ---------------------------------------------------------------------------
// Policies and evaluation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyMode {
    /// Always trade the greedy action.
    Forced,
    /// Trade the greedy action only when its reward history is significant.
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub mode: PolicyMode,
    pub t_threshold: f64,
    pub n_min: u64,
}

impl Policy {
    pub fn new(mode: PolicyMode) -> Self {
        Policy {
            mode,
            t_threshold: DEFAULT_T_THRESHOLD,
            n_min: DEFAULT_N_MIN,
        }
    }

    /// Thresholds taken from the table's hyperparameters.
    pub fn for_table(table: &QTable, mode: PolicyMode) -> Self {
        Policy {
            mode,
            t_threshold: table.hyper.t_threshold,
            n_min: table.hyper.n_min,
        }
    }
}

/// Greedy action by `q` (ties go to `Long`). An unseen state yields `Long`
/// when forced and `Abstain` when restricted.
pub fn policy_act(table: &QTable, s: StateId, policy: &Policy) -> TradeAction {
    let seen = table.cell(s, TradeAction::Long).is_some() || table.cell(s, TradeAction::Short).is_some();
    match policy.mode {
        PolicyMode::Forced if !seen => TradeAction::Long,
        PolicyMode::Forced => greedy(table, s),
        PolicyMode::Restricted if !seen => TradeAction::Abstain,
        PolicyMode::Restricted => {
            let a = greedy(table, s);
            let significant = table
                .cell(s, a)
                .filter(|c| c.n >= policy.n_min.max(2))
                .and_then(QCell::t_stat)
                .is_some_and(|t| t >= policy.t_threshold);
            if significant {
                a
            } else {
                TradeAction::Abstain
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionCounts {
    pub long: usize,
    pub short: usize,
    pub abstain: usize,
}

impl ActionCounts {
    fn add(&mut self, a: TradeAction) {
        match a {
            TradeAction::Long => self.long += 1,
            TradeAction::Short => self.short += 1,
            TradeAction::Abstain => self.abstain += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub symbol: String,
    pub mode: PolicyMode,
    pub dates: Vec<NaiveDate>,
    pub actions: Vec<TradeAction>,
    pub daily_returns: Vec<f64>,
    /// Mean over sample std of the daily returns (zero risk-free rate);
    /// `None` when undefined.
    pub sharpe: Option<f64>,
    pub action_counts: ActionCounts,
}

/// `mean / std` (sample std) at the returns' own horizon; `None` for fewer
/// than two points or zero dispersion.
pub fn daily_sharpe(returns: &[f64]) -> Option<f64> {
    let n = returns.len();
    if n < 2 {
        return None;
    }
    let mean = returns.iter().sum::<f64>() / n as f64;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    (var > 0.0).then(|| mean / var.sqrt())
}

/// Run the policy over every day of `series` that has a state and a next bar.
pub fn evaluate(table: &QTable, series: &PriceSeries, policy: &Policy) -> Result<Evaluation> {
    let spec = &table.spec;
    let min_len = spec.long_window + 2;
    if series.len() < min_len {
        return Err(Error::TooShort {
            needed: min_len,
            have: series.len(),
        });
    }
    let closes = series.closes();
    let features = momentum_features(closes, spec.short_window, spec.long_window)?;
    let states = states_for(&features, spec);
    let mut ev = Evaluation {
        symbol: series.symbol().to_string(),
        mode: policy.mode,
        dates: Vec::with_capacity(states.len()),
        actions: Vec::with_capacity(states.len()),
        daily_returns: Vec::with_capacity(states.len()),
        sharpe: None,
        action_counts: ActionCounts::default(),
    };
    for (j, &s) in states[..states.len() - 1].iter().enumerate() {
        let t = spec.long_window + j;
        let a = policy_act(table, s, policy);
        ev.dates.push(series.dates()[t]);
        ev.actions.push(a);
        ev.daily_returns.push(reward(series, t, a)?);
        ev.action_counts.add(a);
    }
    ev.sharpe = daily_sharpe(&ev.daily_returns);
    Ok(ev)
}
