//! One function per subcommand. Each reads a resolved [`RunConfig`], writes
//! its files under `cfg.out`, and returns the in-memory report it wrote.

use std::path::PathBuf;

use anyhow::{bail, Context};
use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use regimekit::marketdata::{
    derive_seed, load_universe, synth_ou, synth_persistent, synth_planted_signal, synth_random_walk, write_csv_to,
    PlantedSignal, PriceSeries,
};
use regimekit::qlearn::{evaluate, train, Evaluation, Policy, PolicyMode, QTable, TradeAction};
use regimekit::selector::{default_grid, run_universe, summarize_gated, sweep, Skipped, SweepPoint, UniverseRun};
use regimekit::stats::{histogram, summary, HistogramData, SummaryStats};
use regimekit::FORMAT_VERSION;

use crate::config::{RunConfig, SynthKind};
use crate::output::{ensure_dir, write_atomic, write_csv_rows, write_json};

fn synth_one(cfg: &RunConfig, seed: u64) -> regimekit::Result<PriceSeries> {
    let sigma = cfg.sigma.unwrap_or_else(|| cfg.kind.default_sigma());
    match cfg.kind {
        SynthKind::Randomwalk => synth_random_walk(cfg.n, seed, sigma, cfg.p0),
        SynthKind::Ou => synth_ou(cfg.n, seed, cfg.theta, cfg.mu, sigma, cfg.mu),
        SynthKind::Persistent => synth_persistent(cfg.n, seed, cfg.phi, sigma),
        SynthKind::Planted => {
            let p = PlantedSignal {
                short_window: cfg.short_window,
                long_window: cfg.long_window,
                threshold: cfg.threshold,
                drift: cfg.drift,
                sigma,
            };
            synth_planted_signal(cfg.n, seed, &p)
        }
    }
}

/// Write `cfg.count` series of `cfg.kind`; series `i` uses `derive_seed(seed, i)`.
pub fn cmd_synth(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    if cfg.count == 0 {
        bail!("count must be at least 1");
    }
    ensure_dir(&cfg.out)?;
    let width = cfg.count.to_string().len().max(3);
    let series: Vec<PriceSeries> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let s = synth_one(cfg, derive_seed(cfg.seed, i as u64))?;
            Ok(s.with_symbol(format!("{}{:0width$}", cfg.kind.prefix(), i)))
        })
        .collect::<regimekit::Result<_>>()?;
    let mut paths = Vec::with_capacity(series.len());
    for s in &series {
        let path = cfg.out.join(format!("{}.csv", s.symbol()));
        let mut buf = Vec::new();
        write_csv_to(s, &mut buf)?;
        write_atomic(&path, &buf)?;
        paths.push(path);
    }
    Ok(paths)
}

fn load(cfg: &RunConfig) -> anyhow::Result<(Vec<PriceSeries>, Vec<Skipped>)> {
    let dir = cfg.universe_dir()?;
    if !dir.is_dir() {
        bail!("universe directory {} does not exist", dir.display());
    }
    let (good, bad) = load_universe(dir).with_context(|| format!("loading universe {}", dir.display()))?;
    let skipped = bad
        .into_iter()
        .map(|(symbol, e)| Skipped {
            symbol,
            reason: e.to_string(),
        })
        .collect();
    Ok((good, skipped))
}

fn write_skipped(cfg: &RunConfig, skipped: &[Skipped]) -> anyhow::Result<()> {
    write_csv_rows(
        &cfg.out.join("skipped.csv"),
        &["symbol", "reason"],
        skipped.iter().map(|s| (&s.symbol, &s.reason)),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroTrades {
    pub momentum: usize,
    pub meanrev: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub format: &'static str,
    pub config: RunConfig,
    pub boundary: f64,
    pub symbols: usize,
    pub skipped: usize,
    pub momentum: SummaryStats,
    pub meanrev: SummaryStats,
    pub gated: SummaryStats,
    /// Symbols whose strategy never traded; their return of 0 is included above.
    pub zero_trade_symbols: ZeroTrades,
    /// Pooled per-trade returns, absent when no trade closed.
    pub trades_momentum: Option<SummaryStats>,
    pub trades_meanrev: Option<SummaryStats>,
}

/// Shared histogram range so the three return histograms line up bin for bin.
fn joint_range(sets: &[&[f64]]) -> (f64, f64) {
    let (lo, hi) = sets
        .iter()
        .flat_map(|s| s.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn write_hist(cfg: &RunConfig, name: &str, h: &HistogramData) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    h.write_csv(&mut buf)?;
    write_atomic(&cfg.out.join(format!("hist_{name}.csv")), &buf)
}

fn run_pipeline(cfg: &RunConfig) -> anyhow::Result<(UniverseRun, Vec<Skipped>)> {
    let (universe, mut skipped) = load(cfg)?;
    if universe.is_empty() {
        bail!("universe {} has no readable series", cfg.universe_dir()?.display());
    }
    let run = run_universe(&universe, &cfg.universe_config())?;
    skipped.extend(run.skipped.iter().cloned());
    Ok((run, skipped))
}

/// Per-symbol rows, the three summary blocks, histograms and skipped symbols.
pub fn cmd_pipeline(cfg: &RunConfig) -> anyhow::Result<PipelineReport> {
    ensure_dir(&cfg.out)?;
    let (run, skipped) = run_pipeline(cfg)?;

    let mom: Vec<f64> = run.rows.iter().map(|r| r.r_momentum).collect();
    let mr: Vec<f64> = run.rows.iter().map(|r| r.r_meanrev).collect();
    let gated: Vec<f64> = run
        .rows
        .iter()
        .map(|r| regimekit::selector::gated_return(r, cfg.boundary))
        .collect();
    let hs: Vec<f64> = run.rows.iter().map(|r| r.h).collect();
    let (zm, zr) = run.zero_trade_counts();

    let report = PipelineReport {
        format: FORMAT_VERSION,
        config: cfg.clone(),
        boundary: cfg.boundary,
        symbols: run.rows.len(),
        skipped: skipped.len(),
        momentum: summary(&mom)?,
        meanrev: summary(&mr)?,
        gated: summarize_gated(&run.rows, cfg.boundary)?,
        zero_trade_symbols: ZeroTrades {
            momentum: zm,
            meanrev: zr,
        },
        trades_momentum: summary(&run.momentum_trades).ok(),
        trades_meanrev: summary(&run.meanrev_trades).ok(),
    };

    write_csv_rows(
        &cfg.out.join("rows.csv"),
        &["symbol", "h", "r_momentum", "r_meanrev", "trades_momentum", "trades_meanrev"],
        run.rows
            .iter()
            .map(|r| (&r.symbol, r.h, r.r_momentum, r.r_meanrev, r.trades_momentum, r.trades_meanrev)),
    )?;
    let range = joint_range(&[&mom, &mr, &gated]);
    write_hist(cfg, "momentum", &histogram(&mom, cfg.hist_bins, Some(range))?)?;
    write_hist(cfg, "meanrev", &histogram(&mr, cfg.hist_bins, Some(range))?)?;
    write_hist(cfg, "gated", &histogram(&gated, cfg.hist_bins, Some(range))?)?;
    write_hist(cfg, "hurst", &histogram(&hs, cfg.hist_bins, Some((0.0, 1.0)))?)?;
    write_skipped(cfg, &skipped)?;
    write_json(&cfg.out.join("summary.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub format: &'static str,
    pub config: RunConfig,
    pub symbols: usize,
    pub skipped: usize,
    pub points: Vec<SweepPoint>,
}

/// `sweep.csv` with one row per grid boundary plus `sweep.json`.
pub fn cmd_sweep(cfg: &RunConfig) -> anyhow::Result<SweepReport> {
    ensure_dir(&cfg.out)?;
    let (run, skipped) = run_pipeline(cfg)?;
    let points = sweep(&run.rows, &default_grid(cfg.grid_step)?)?;
    write_csv_rows(
        &cfg.out.join("sweep.csv"),
        &["boundary", "mean", "median", "std", "n"],
        points
            .iter()
            .map(|p| (p.boundary, p.stats.mean, p.stats.median, p.stats.std, p.stats.n)),
    )?;
    write_skipped(cfg, &skipped)?;
    let report = SweepReport {
        format: FORMAT_VERSION,
        config: cfg.clone(),
        symbols: run.rows.len(),
        skipped: skipped.len(),
        points,
    };
    write_json(&cfg.out.join("sweep.json"), &report)?;
    Ok(report)
}

fn clip(
    universe: Vec<PriceSeries>,
    range: (Option<NaiveDate>, Option<NaiveDate>),
    skipped: &mut Vec<Skipped>,
) -> Vec<PriceSeries> {
    let mut kept = Vec::with_capacity(universe.len());
    for s in universe {
        match s.between(range.0, range.1) {
            Ok(c) => kept.push(c),
            Err(_) => skipped.push(Skipped {
                symbol: s.symbol().to_string(),
                reason: "no observations in the requested date range".into(),
            }),
        }
    }
    kept
}

#[derive(Debug, Clone, Serialize)]
pub struct QTrainReport {
    pub format: &'static str,
    pub config: RunConfig,
    pub symbols: usize,
    pub skipped: usize,
    pub training_steps: u64,
    pub training_span: Option<(NaiveDate, NaiveDate)>,
    pub bins_collapsed: bool,
    pub cells: usize,
}

/// Train on the training range of every symbol; writes `qtable.json` and
/// `qtrain.json`.
pub fn cmd_qtrain(cfg: &RunConfig) -> anyhow::Result<(QTable, QTrainReport)> {
    ensure_dir(&cfg.out)?;
    let (universe, mut skipped) = load(cfg)?;
    let universe = clip(universe, cfg.train_range(), &mut skipped);
    if universe.is_empty() {
        bail!("no series has observations in the training range");
    }
    let table = train(&universe, cfg.state_config(), cfg.hyperparams())?;
    let mut doc = table.to_json()?;
    doc.push('\n');
    write_atomic(&cfg.qtable_path(), doc.as_bytes())?;
    write_skipped(cfg, &skipped)?;
    let report = QTrainReport {
        format: FORMAT_VERSION,
        config: cfg.clone(),
        symbols: universe.len(),
        skipped: skipped.len(),
        training_steps: table.training_steps,
        training_span: table.training_span,
        bins_collapsed: table.bins_collapsed,
        cells: table.cells().count(),
    };
    write_json(&cfg.out.join("qtrain.json"), &report)?;
    Ok((table, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolEval {
    pub symbol: String,
    pub days: usize,
    pub sharpe: Option<f64>,
    pub action_counts: regimekit::qlearn::ActionCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeReport {
    pub mode: PolicyMode,
    /// Median over symbols with a defined Sharpe ratio.
    pub median_sharpe: Option<f64>,
    pub symbols: Vec<SymbolEval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QEvalReport {
    pub format: &'static str,
    pub config: RunConfig,
    pub qtable: PathBuf,
    pub eval_span: (NaiveDate, NaiveDate),
    pub skipped: Vec<Skipped>,
    pub modes: Vec<ModeReport>,
}

fn action_name(a: TradeAction) -> &'static str {
    match a {
        TradeAction::Long => "long",
        TradeAction::Short => "short",
        TradeAction::Abstain => "abstain",
    }
}

fn mode_name(m: PolicyMode) -> &'static str {
    match m {
        PolicyMode::Forced => "forced",
        PolicyMode::Restricted => "restricted",
    }
}

/// Evaluate both policies on the evaluation range; writes `qeval.json` and
/// `qeval_daily.csv`.
pub fn cmd_qeval(cfg: &RunConfig) -> anyhow::Result<QEvalReport> {
    let qpath = cfg.qtable_path();
    if !qpath.is_file() {
        bail!("q-table {} not found; run qtrain first", qpath.display());
    }
    let table = QTable::load(&qpath)?;
    ensure_dir(&cfg.out)?;
    let (universe, mut skipped) = load(cfg)?;
    let universe = clip(universe, cfg.eval_range(), &mut skipped);
    if universe.is_empty() {
        bail!("no series has observations in the evaluation range");
    }
    let from = universe.iter().map(PriceSeries::first_date).min().expect("non-empty");
    let to = universe.iter().map(PriceSeries::last_date).max().expect("non-empty");
    table.check_disjoint(from, to)?;

    let mut modes = Vec::new();
    let mut daily: Vec<(String, &'static str, NaiveDate, &'static str, f64)> = Vec::new();
    for mode in [PolicyMode::Restricted, PolicyMode::Forced] {
        let policy = Policy {
            mode,
            t_threshold: cfg.q_t_threshold,
            n_min: cfg.q_n_min,
        };
        let results: Vec<(String, regimekit::Result<Evaluation>)> = universe
            .par_iter()
            .map(|s| (s.symbol().to_string(), evaluate(&table, s, &policy)))
            .collect();
        let mut symbols = Vec::new();
        for (symbol, r) in results {
            match r {
                Ok(ev) => {
                    for ((d, a), r) in ev.dates.iter().zip(&ev.actions).zip(&ev.daily_returns) {
                        daily.push((symbol.clone(), mode_name(mode), *d, action_name(*a), *r));
                    }
                    symbols.push(SymbolEval {
                        symbol,
                        days: ev.daily_returns.len(),
                        sharpe: ev.sharpe,
                        action_counts: ev.action_counts,
                    });
                }
                Err(e) if mode == PolicyMode::Restricted => skipped.push(Skipped {
                    symbol,
                    reason: e.to_string(),
                }),
                Err(_) => {}
            }
        }
        let sharpes: Vec<f64> = symbols.iter().filter_map(|s| s.sharpe).collect();
        modes.push(ModeReport {
            mode,
            median_sharpe: summary(&sharpes).ok().map(|s| s.median),
            symbols,
        });
    }

    write_csv_rows(
        &cfg.out.join("qeval_daily.csv"),
        &["symbol", "mode", "date", "action", "daily_return"],
        daily,
    )?;
    let report = QEvalReport {
        format: FORMAT_VERSION,
        config: cfg.clone(),
        qtable: qpath,
        eval_span: (from, to),
        skipped,
        modes,
    };
    write_json(&cfg.out.join("qeval.json"), &report)?;
    Ok(report)
}
