//! Resolved run configuration.
//!
//! Values come from three layers: built-in defaults, an optional flat TOML
//! file, and command-line flags, with later layers overriding earlier ones.
//! Unknown keys in the file are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use regimekit::backtest::MomentumParams;
use regimekit::hurst::DEFAULT_BOUNDARY;
use regimekit::indicators::{BandParams, DEFAULT_BAND_K, DEFAULT_BAND_WINDOW, DEFAULT_LONG_WINDOW, DEFAULT_SHORT_WINDOW};
use regimekit::qlearn::{
    Exploration, Hyperparams, StateConfig, StepSize, DEFAULT_BINS, DEFAULT_N_MIN, DEFAULT_T_THRESHOLD,
};
use regimekit::selector::{default_grid, UniverseConfig, DEFAULT_SPLIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    Randomwalk,
    Ou,
    Persistent,
    Planted,
}

impl SynthKind {
    pub fn prefix(self) -> &'static str {
        match self {
            SynthKind::Randomwalk => "RW",
            SynthKind::Ou => "OU",
            SynthKind::Persistent => "AR",
            SynthKind::Planted => "PS",
        }
    }

    pub fn default_sigma(self) -> f64 {
        match self {
            SynthKind::Ou => 0.02,
            _ => 0.01,
        }
    }
}

/// Dates may be written as TOML date literals or as quoted ISO strings.
mod toml_date {
    use chrono::NaiveDate;
    use serde::{de::Error, Deserialize, Deserializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Toml(toml::value::Datetime),
    }

    fn convert<E: Error>(raw: Raw) -> Result<NaiveDate, E> {
        let text = match raw {
            Raw::Text(s) => s,
            Raw::Toml(d) if d.time.is_none() && d.offset.is_none() => d.to_string(),
            Raw::Toml(d) => return Err(E::custom(format!("expected a date without time, got {d}"))),
        };
        text.parse().map_err(|e| E::custom(format!("bad date {text:?}: {e}")))
    }

    pub fn date<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
        convert(Raw::deserialize(d)?)
    }

    pub fn opt_date<'de, D: Deserializer<'de>>(d: D) -> Result<Option<NaiveDate>, D::Error> {
        Option::<Raw>::deserialize(d)?.map(convert).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub universe: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    #[serde(deserialize_with = "toml_date::date")]
    pub split_date: NaiveDate,

    pub short_window: usize,
    pub long_window: usize,
    pub band_window: usize,
    pub band_k: f64,

    pub boundary: f64,
    pub grid_step: f64,
    pub hist_bins: usize,

    pub kind: SynthKind,
    pub count: usize,
    pub n: usize,
    /// Per-kind default when unset.
    pub sigma: Option<f64>,
    pub theta: f64,
    pub mu: f64,
    pub phi: f64,
    pub p0: f64,
    pub drift: f64,
    pub threshold: f64,

    pub q_bins: usize,
    /// Constant step size; harmonic `1/(n+1)` when unset.
    pub q_alpha: Option<f64>,
    pub q_gamma: f64,
    /// Epsilon-greedy exploration; both-action updates when unset.
    pub q_epsilon: Option<f64>,
    pub q_t_threshold: f64,
    pub q_n_min: u64,
    #[serde(deserialize_with = "toml_date::opt_date")]
    pub train_from: Option<NaiveDate>,
    /// Defaults to the day before `split_date`.
    #[serde(deserialize_with = "toml_date::opt_date")]
    pub train_to: Option<NaiveDate>,
    /// Defaults to `split_date`.
    #[serde(deserialize_with = "toml_date::opt_date")]
    pub eval_from: Option<NaiveDate>,
    #[serde(deserialize_with = "toml_date::opt_date")]
    pub eval_to: Option<NaiveDate>,
    /// Defaults to `<out>/qtable.json`.
    pub qtable: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            universe: None,
            out: PathBuf::from("out"),
            seed: 0,
            split_date: DEFAULT_SPLIT,
            short_window: DEFAULT_SHORT_WINDOW,
            long_window: DEFAULT_LONG_WINDOW,
            band_window: DEFAULT_BAND_WINDOW,
            band_k: DEFAULT_BAND_K,
            boundary: DEFAULT_BOUNDARY,
            grid_step: 0.01,
            hist_bins: 40,
            kind: SynthKind::Randomwalk,
            count: 10,
            n: 252,
            sigma: None,
            theta: 0.3,
            mu: 0.0,
            phi: 0.6,
            p0: 100.0,
            drift: 0.005,
            threshold: 0.004,
            q_bins: DEFAULT_BINS,
            q_alpha: None,
            q_gamma: 0.0,
            q_epsilon: None,
            q_t_threshold: DEFAULT_T_THRESHOLD,
            q_n_min: DEFAULT_N_MIN,
            train_from: None,
            train_to: None,
            eval_from: None,
            eval_to: None,
            qtable: None,
        }
    }
}

/// Command-line overrides; every flag mirrors a config key.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Flat TOML file of config keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of `<SYMBOL>.csv` files.
    #[arg(long)]
    pub universe: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub split_date: Option<NaiveDate>,
    #[arg(long)]
    pub short_window: Option<usize>,
    #[arg(long)]
    pub long_window: Option<usize>,
    #[arg(long)]
    pub band_window: Option<usize>,
    #[arg(long)]
    pub band_k: Option<f64>,
    #[arg(long)]
    pub boundary: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub hist_bins: Option<usize>,
    #[arg(long, value_enum)]
    pub kind: Option<SynthKind>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub drift: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub q_bins: Option<usize>,
    #[arg(long)]
    pub q_alpha: Option<f64>,
    #[arg(long)]
    pub q_gamma: Option<f64>,
    #[arg(long)]
    pub q_epsilon: Option<f64>,
    #[arg(long)]
    pub q_t_threshold: Option<f64>,
    #[arg(long)]
    pub q_n_min: Option<u64>,
    #[arg(long)]
    pub train_from: Option<NaiveDate>,
    #[arg(long)]
    pub train_to: Option<NaiveDate>,
    #[arg(long)]
    pub eval_from: Option<NaiveDate>,
    #[arg(long)]
    pub eval_to: Option<NaiveDate>,
    #[arg(long)]
    pub qtable: Option<PathBuf>,
}

macro_rules! overlay {
    ($cfg:ident, $args:ident; plain: $($p:ident),*; optional: $($o:ident),*) => {
        $(if let Some(v) = $args.$p.clone() { $cfg.$p = v; })*
        $(if let Some(v) = $args.$o.clone() { $cfg.$o = Some(v); })*
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<RunConfig> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        RunConfig::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Defaults, then `--config` if given, then flags; validated.
    pub fn resolve(args: &ConfigArgs) -> anyhow::Result<RunConfig> {
        let mut cfg = match &args.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        overlay!(cfg, args;
            plain: out, seed, split_date, short_window, long_window, band_window, band_k, boundary,
                grid_step, hist_bins, kind, count, n, theta, mu, phi, p0, drift, threshold, q_bins,
                q_gamma, q_t_threshold, q_n_min;
            optional: universe, sigma, q_alpha, q_epsilon, train_from, train_to, eval_from, eval_to, qtable);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.momentum().validate()?;
        if self.band_window < 2 || !(self.band_k >= 0.0 && self.band_k.is_finite()) {
            bail!("need band_window >= 2 and finite band_k >= 0");
        }
        if !(0.0..=1.0).contains(&self.boundary) {
            bail!("boundary must lie in [0, 1], got {}", self.boundary);
        }
        default_grid(self.grid_step)?;
        if self.hist_bins == 0 {
            bail!("hist_bins must be at least 1");
        }
        self.state_config().validate()?;
        self.hyperparams().validate()?;
        if let (Some(a), Some(b)) = (self.train_from, self.train_to) {
            if a > b {
                bail!("train_from {a} is after train_to {b}");
            }
        }
        if let (Some(a), Some(b)) = (self.eval_from, self.eval_to) {
            if a > b {
                bail!("eval_from {a} is after eval_to {b}");
            }
        }
        Ok(())
    }

    pub fn momentum(&self) -> MomentumParams {
        MomentumParams {
            short_window: self.short_window,
            long_window: self.long_window,
        }
    }

    pub fn bands(&self) -> BandParams {
        BandParams {
            window: self.band_window,
            k: self.band_k,
        }
    }

    pub fn universe_config(&self) -> UniverseConfig {
        UniverseConfig {
            split_date: self.split_date,
            momentum: self.momentum(),
            bands: self.bands(),
        }
    }

    pub fn state_config(&self) -> StateConfig {
        StateConfig {
            short_window: self.short_window,
            long_window: self.long_window,
            bins_per_dim: self.q_bins,
        }
    }

    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            step_size: self.q_alpha.map_or(StepSize::Harmonic, |alpha| StepSize::Constant { alpha }),
            gamma: self.q_gamma,
            exploration: self
                .q_epsilon
                .map_or(Exploration::BothActions, |epsilon| Exploration::EpsilonGreedy { epsilon }),
            t_threshold: self.q_t_threshold,
            n_min: self.q_n_min,
            seed: self.seed,
        }
    }

    pub fn universe_dir(&self) -> anyhow::Result<&Path> {
        self.universe.as_deref().context("no universe directory given (--universe or `universe` key)")
    }

    pub fn qtable_path(&self) -> PathBuf {
        self.qtable.clone().unwrap_or_else(|| self.out.join("qtable.json"))
    }

    pub fn train_range(&self) -> (Option<NaiveDate>, Option<NaiveDate>) {
        (self.train_from, self.train_to.or_else(|| self.split_date.pred_opt()))
    }

    pub fn eval_range(&self) -> (Option<NaiveDate>, Option<NaiveDate>) {
        (self.eval_from.or(Some(self.split_date)), self.eval_to)
    }
}
