//! Acceptance criteria A1 to A10. Runs without the libtest harness and prints
//! one `PASS`/`FAIL` line per criterion.
//!
//! A4 is a reported criterion: its line is printed but does not set the exit
//! status. Every other criterion is asserted.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use chrono::NaiveDate;
use regimekit::backtest::{meanrev_signals, momentum_signals, run_backtest, Signal, SignalSeries};
use regimekit::hurst::{classify, estimate_hurst, Regime};
use regimekit::indicators::{sma, BandParams};
use regimekit::marketdata::{
    derive_seed, load_csv, synth_ou, synth_persistent, synth_planted_signal, synth_random_walk, NormalStream,
    PlantedSignal, PriceSeries,
};
use regimekit::qlearn::{evaluate, train, train_observed, Hyperparams, Policy, PolicyMode, QTable, StateConfig};
use regimekit::selector::{gated_return, run_universe, UniverseConfig};
use regimekit::stats::{histogram, sharpe, summary, SummaryStats, DEFAULT_RISK_FREE};
use regimekit_cli::{cmd_sweep, cmd_synth, RunConfig, SynthKind};

const N: usize = 2048;

/// Id, name, whether the result sets the exit status, and the check.
type Criterion = (&'static str, &'static str, bool, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn persistent_universe() -> Vec<PriceSeries> {
    (0..100)
        .map(|i| synth_persistent(N, derive_seed(1, i), 0.6, 0.01).unwrap().with_symbol(format!("AR{i:03}")))
        .collect()
}

fn ou_universe() -> Vec<PriceSeries> {
    (0..100)
        .map(|i| synth_ou(N, derive_seed(2, i), 0.3, 0.0, 0.02, 0.0).unwrap().with_symbol(format!("OU{i:03}")))
        .collect()
}

fn a1() -> Outcome {
    let start = Instant::now();
    let ar = persistent_universe();
    let ou = ou_universe();
    let trending = ar
        .iter()
        .filter(|s| classify(estimate_hurst(s).unwrap().h, 0.5) == Regime::Trending)
        .count();
    let reverting = ou
        .iter()
        .filter(|s| classify(estimate_hurst(s).unwrap().h, 0.5) == Regime::MeanReverting)
        .count();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        trending >= 90 && reverting >= 90 && secs < 10.0,
        format!("persistent trending {trending}/100, OU mean-reverting {reverting}/100, {secs:.2}s single-threaded"),
    )
}

fn a2() -> Outcome {
    let hs: Vec<f64> = (0..100)
        .map(|i| estimate_hurst(&synth_random_walk(N, derive_seed(3, i), 0.01, 100.0).unwrap()).unwrap().h)
        .collect();
    let mean = hs.iter().sum::<f64>() / hs.len() as f64;
    outcome((0.45..=0.60).contains(&mean), format!("mean h over 100 random walks = {mean:.4}, want [0.45, 0.60]"))
}

fn same_bits(a: &SummaryStats, b: &SummaryStats) -> bool {
    a.mean.to_bits() == b.mean.to_bits()
        && a.median.to_bits() == b.median.to_bits()
        && a.std.to_bits() == b.std.to_bits()
        && a.n == b.n
}

fn parse_sweep_row(line: &str) -> SummaryStats {
    let f: Vec<&str> = line.split(',').collect();
    SummaryStats {
        mean: f[1].parse().unwrap(),
        median: f[2].parse().unwrap(),
        std: f[3].parse().unwrap(),
        n: f[4].parse().unwrap(),
        degenerate: false,
    }
}

fn a3() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let uni = tmp.path().join("universe");
    for (kind, seed) in [(SynthKind::Ou, 11), (SynthKind::Persistent, 12), (SynthKind::Randomwalk, 13)] {
        let cfg = RunConfig {
            kind,
            seed,
            count: 15,
            n: 400,
            out: uni.clone(),
            ..RunConfig::default()
        };
        cmd_synth(&cfg).unwrap();
    }
    let cfg = RunConfig {
        universe: Some(uni.clone()),
        out: tmp.path().join("out"),
        ..RunConfig::default()
    };
    let report = cmd_sweep(&cfg).unwrap();

    let mut series: Vec<PriceSeries> = std::fs::read_dir(&uni)
        .unwrap()
        .map(|e| load_csv(e.unwrap().path()).unwrap())
        .collect();
    series.sort_by(|a, b| a.symbol().cmp(b.symbol()));
    let run = run_universe(&series, &UniverseConfig::default()).unwrap();
    let mom = summary(&run.rows.iter().map(|r| r.r_momentum).collect::<Vec<_>>()).unwrap();
    let mr = summary(&run.rows.iter().map(|r| r.r_meanrev).collect::<Vec<_>>()).unwrap();

    let text = std::fs::read_to_string(cfg.out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().skip(1).collect();
    let (first, last) = (parse_sweep_row(lines[0]), parse_sweep_row(lines[lines.len() - 1]));
    let pass = lines.len() == 101
        && same_bits(&first, &mom)
        && same_bits(&last, &mr)
        && same_bits(&report.points[0].stats, &mom)
        && same_bits(&report.points[100].stats, &mr);
    outcome(
        pass,
        format!(
            "{} rows; first row mean {} vs all-momentum {}; last row mean {} vs all-mean-reversion {}",
            lines.len(),
            first.mean,
            mom.mean,
            last.mean,
            mr.mean
        ),
    )
}

fn a4() -> Outcome {
    let mut uni = persistent_universe();
    uni.extend(ou_universe());
    let cfg = UniverseConfig {
        split_date: uni[0].dates()[N / 2],
        ..UniverseConfig::default()
    };
    let run = run_universe(&uni, &cfg).unwrap();
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let mom = mean(run.rows.iter().map(|r| r.r_momentum).collect());
    let mr = mean(run.rows.iter().map(|r| r.r_meanrev).collect());
    let gated = mean(run.rows.iter().map(|r| gated_return(r, 0.5)).collect());
    let (lo, hi) = (mom.min(mr), mom.max(mr));
    outcome(
        lo <= gated && gated <= hi,
        format!("[reported] momentum mean {mom:.4}, mean-reversion mean {mr:.4}, gated mean {gated:.4}"),
    )
}

fn a5() -> Outcome {
    let m = sharpe(0.0005, 0.0290, DEFAULT_RISK_FREE).unwrap();
    let r = sharpe(0.0192, 0.0648, DEFAULT_RISK_FREE).unwrap();
    let pass = m < 0.0 && r < 0.0 && (m - -0.672).abs() <= 1e-3 && (r - -0.012).abs() <= 1e-3;
    outcome(pass, format!("momentum {m:.5}, mean reversion {r:.5}"))
}

fn a6() -> Outcome {
    let uni: Vec<PriceSeries> = (0..10)
        .map(|i| synth_random_walk(500, derive_seed(6, i), 0.01, 50.0).unwrap())
        .collect();
    let mut log: BTreeMap<_, Vec<f64>> = BTreeMap::new();
    let table = train_observed(&uni, StateConfig::default(), Hyperparams::default(), |e| {
        log.entry((e.state, e.action)).or_default().push(e.reward)
    })
    .unwrap();
    let mut worst = 0.0f64;
    let mut covered = true;
    for ((s, a), cell) in table.cells() {
        match log.get(&(*s, *a)) {
            Some(rs) if rs.len() as u64 == cell.n => {
                let oracle = rs.iter().sum::<f64>() / rs.len() as f64;
                worst = worst.max((cell.q - oracle).abs());
            }
            _ => covered = false,
        }
    }
    let cells = table.cells().count();
    outcome(
        covered && cells == log.len() && worst <= 1e-12,
        format!("{cells} cells, max |q - brute-force mean| = {worst:.3e}"),
    )
}

fn median(v: &[f64]) -> f64 {
    summary(v).unwrap().median
}

fn sd(v: &[f64]) -> f64 {
    summary(v).unwrap().std
}

const EVAL_START: NaiveDate = match NaiveDate::from_ymd_opt(2022, 1, 3) {
    Some(d) => d,
    None => panic!(),
};

/// Per seed: (restricted, forced) evaluation Sharpe of a table trained on
/// `equities` planted-signal series. An undefined Sharpe (no trades) counts as 0.
fn planted_sharpes(equities: u64) -> Vec<(f64, f64)> {
    let p = PlantedSignal::default();
    (0..50u64)
        .map(|seed| {
            let train_set: Vec<PriceSeries> = (0..equities)
                .map(|i| synth_planted_signal(250, derive_seed(seed, i), &p).unwrap())
                .collect();
            let table = train(&train_set, StateConfig::default(), Hyperparams::default()).unwrap();
            let eval = synth_planted_signal(2000, derive_seed(seed + 1000, 0), &p)
                .unwrap()
                .with_start(EVAL_START);
            table.check_disjoint(eval.first_date(), eval.last_date()).unwrap();
            let run = |mode| evaluate(&table, &eval, &Policy::for_table(&table, mode)).unwrap().sharpe.unwrap_or(0.0);
            (run(PolicyMode::Restricted), run(PolicyMode::Forced))
        })
        .collect()
}

fn a7() -> Outcome {
    let start = Instant::now();
    let s = planted_sharpes(20);
    let restricted: Vec<f64> = s.iter().map(|x| x.0).collect();
    let forced: Vec<f64> = s.iter().map(|x| x.1).collect();
    let (mr, mf) = (median(&restricted), median(&forced));
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mr > mf && secs < 60.0,
        format!("median daily Sharpe restricted {mr:.4} vs forced {mf:.4} over 50 seeds, {secs:.2}s"),
    )
}

fn a8() -> Outcome {
    let one = planted_sharpes(1);
    let many = planted_sharpes(20);
    let col = |v: &[(f64, f64)], f: fn(&(f64, f64)) -> f64| v.iter().map(f).collect::<Vec<_>>();
    let (r1, r20) = (sd(&col(&one, |x| x.0)), sd(&col(&many, |x| x.0)));
    let (f1, f20) = (sd(&col(&one, |x| x.1)), sd(&col(&many, |x| x.1)));
    outcome(
        r20 < r1 && f20 < f1,
        format!("Sharpe SD across seeds, 1 vs 20 equities: restricted {r1:.4} vs {r20:.4}, forced {f1:.4} vs {f20:.4}"),
    )
}

fn a9() -> Outcome {
    let mut rng = NormalStream::new(9);
    let bands = BandParams::default();
    let mut mismatches = 0;
    for k in 0..1000u64 {
        let seed = derive_seed(9, k);
        let full = match k % 3 {
            0 => synth_random_walk(300, seed, 0.01, 100.0),
            1 => synth_ou(300, seed, 0.3, 0.0, 0.02, 0.0),
            _ => synth_persistent(300, seed, 0.6, 0.01),
        }
        .unwrap();
        let len = 20 + (rng.uniform() * 281.0) as usize;
        let len = len.min(300);
        let prefix = full.head(len).unwrap();
        let same = |a: SignalSeries, b: SignalSeries| a.markers() == &b.markers()[..len];
        if !same(momentum_signals(&prefix, Default::default()).unwrap(), momentum_signals(&full, Default::default()).unwrap())
            || !same(meanrev_signals(&prefix, bands).unwrap(), meanrev_signals(&full, bands).unwrap())
        {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("1000 random prefixes, {mismatches} mismatches"))
}

fn a10() -> Outcome {
    let mut failures = Vec::new();

    // indicator affine response
    let x: Vec<f64> = synth_ou(500, 10, 0.3, 0.0, 0.02, 0.0).unwrap().closes().to_vec();
    let (a, b) = (3.5, -2.0);
    let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
    let (sx, sy) = (sma(&x, 20).unwrap(), sma(&y, 20).unwrap());
    if sx.defined().iter().zip(sy.defined()).any(|(p, q)| (a * p + b - q).abs() > 1e-12 * (1.0 + q.abs())) {
        failures.push("sma affine");
    }

    // Hurst scale invariance: exact for power-of-two factors
    for i in 0..20 {
        let s = synth_persistent(N, derive_seed(10, i), 0.6, 0.01).unwrap();
        let scaled = PriceSeries::new("S", s.dates().to_vec(), s.closes().iter().map(|c| c * 8.0).collect()).unwrap();
        if estimate_hurst(&s).unwrap().h.to_bits() != estimate_hurst(&scaled).unwrap().h.to_bits() {
            failures.push("hurst scale");
            break;
        }
    }

    // equity curve equals the product of trade factors
    for i in 0..20 {
        let s = synth_ou(500, derive_seed(11, i), 0.3, 0.0, 0.02, 0.0).unwrap();
        for sig in [momentum_signals(&s, Default::default()).unwrap(), meanrev_signals(&s, BandParams::default()).unwrap()] {
            let r = run_backtest(&s, &sig).unwrap();
            let product: f64 = r.trades.iter().map(|t| 1.0 + t.trade_return).product();
            if (r.equity_curve.last().unwrap() - product).abs() > 1e-12 || sig.count(Signal::Enter) < r.n_trades() {
                failures.push("equity identity");
            }
        }
    }

    // histogram count conservation
    let mut z = NormalStream::new(12);
    let v: Vec<f64> = (0..5000).map(|_| z.next_normal()).collect();
    for bins in [1, 7, 50] {
        let h = histogram(&v, bins, None).unwrap();
        let clipped = histogram(&v, bins, Some((-1.0, 1.0))).unwrap();
        if h.total() != v.len() || clipped.total() + clipped.out_of_range != v.len() {
            failures.push("histogram conservation");
        }
    }

    // QTable JSON round trip
    let uni: Vec<PriceSeries> = (0..5).map(|i| synth_random_walk(400, derive_seed(13, i), 0.01, 50.0).unwrap()).collect();
    let table = train(&uni, StateConfig::default(), Hyperparams::default()).unwrap();
    let back = QTable::from_json(&table.to_json().unwrap()).unwrap();
    if back != table || back.to_json().unwrap() != table.to_json().unwrap() {
        failures.push("qtable round trip");
    }

    failures.dedup();
    let detail = if failures.is_empty() {
        "affine sma, hurst scale, equity identity, histogram conservation, qtable round trip".to_string()
    } else {
        format!("failed: {}", failures.join(", "))
    };
    outcome(failures.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("A1", "hurst separation", true, a1),
        ("A2", "random-walk calibration", true, a2),
        ("A3", "sweep endpoint identities", true, a3),
        ("A4", "gated mean between strategies", false, a4),
        ("A5", "sharpe sign check", true, a5),
        ("A6", "bandit identity", true, a6),
        ("A7", "restricted beats forced", true, a7),
        ("A8", "pooling consistency", true, a8),
        ("A9", "no lookahead", true, a9),
        ("A10", "invariant suites", true, a10),
    ];
    let mut failed = 0;
    for (id, name, asserted, check) in criteria {
        let o = check();
        println!("{id:<4} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if asserted && !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} asserted criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
