use std::path::Path;
use std::process::{Command, Output};

use regimekit::marketdata::load_csv;
use regimekit::selector::{run_universe, summarize_gated, UniverseConfig};

fn regimekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regimekit")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = regimekit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

#[test]
fn synth_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&["synth", "--kind", "ou", "--count", "100", "--seed", "1", "--out", p(d)]);
    }
    let names = files(&a);
    assert_eq!(names.len(), 100);
    assert_eq!(names[0], "OU000.csv");
    for n in &names {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap());
    }
}

#[test]
fn synth_rejects_zero_count() {
    let tmp = tempfile::tempdir().unwrap();
    let out = regimekit(&["synth", "--count", "0", "--out", p(tmp.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("count"));
}

#[test]
fn pipeline_single_symbol_matches_library() {
    let tmp = tempfile::tempdir().unwrap();
    let uni = tmp.path().join("u");
    let out = tmp.path().join("out");
    ok(&["synth", "--kind", "persistent", "--count", "1", "--seed", "5", "--n", "300", "--out", p(&uni)]);
    ok(&["pipeline", "--universe", p(&uni), "--out", p(&out)]);

    let series = load_csv(uni.join("AR000.csv")).unwrap();
    let run = run_universe(&[series], &UniverseConfig::default()).unwrap();
    let row = &run.rows[0];

    let text = std::fs::read_to_string(out.join("rows.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(f[0], "AR000");
    assert_eq!(f[1].parse::<f64>().unwrap(), row.h);
    assert_eq!(f[2].parse::<f64>().unwrap(), row.r_momentum);
    assert_eq!(f[3].parse::<f64>().unwrap(), row.r_meanrev);

    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["format"], regimekit::FORMAT_VERSION);
    assert_eq!(summary["config"]["boundary"], 0.5);
    let gated = summarize_gated(&run.rows, 0.5).unwrap();
    assert_eq!(summary["gated"]["mean"].as_f64().unwrap(), gated.mean);
    for name in ["hist_momentum.csv", "hist_meanrev.csv", "hist_gated.csv", "hist_hurst.csv", "skipped.csv"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    assert!(files(&out).iter().all(|n| !n.starts_with(".tmp")));
}

#[test]
fn pipeline_reports_bad_files_and_missing_dirs() {
    let tmp = tempfile::tempdir().unwrap();
    let uni = tmp.path().join("u");
    ok(&["synth", "--count", "3", "--out", p(&uni)]);
    std::fs::write(uni.join("BAD.csv"), "date,close\n2021-01-04,-1\n").unwrap();
    let out = tmp.path().join("out");
    ok(&["pipeline", "--universe", p(&uni), "--out", p(&out)]);
    let skipped = std::fs::read_to_string(out.join("skipped.csv")).unwrap();
    assert!(skipped.lines().any(|l| l.starts_with("BAD,")), "{skipped}");

    let missing = regimekit(&["pipeline", "--universe", p(&tmp.path().join("nope")), "--out", p(&out)]);
    assert!(!missing.status.success());
    assert!(!missing.stderr.is_empty());
}

#[test]
fn sweep_has_one_row_per_boundary() {
    let tmp = tempfile::tempdir().unwrap();
    let uni = tmp.path().join("u");
    let out = tmp.path().join("out");
    ok(&["synth", "--count", "4", "--out", p(&uni)]);
    ok(&["sweep", "--universe", p(&uni), "--out", p(&out)]);
    let text = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "boundary,mean,median,std,n");
    assert_eq!(text.lines().count(), 102);
    ok(&["sweep", "--universe", p(&uni), "--out", p(&out), "--grid-step", "0.25"]);
    assert_eq!(std::fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count(), 6);
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let uni = tmp.path().join("u");
    let out = tmp.path().join("out");
    ok(&["synth", "--count", "3", "--out", p(&uni)]);
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, format!("universe = {:?}\nout = {:?}\nboundary = 0.3\ngrid_step = 0.5\n", p(&uni), p(&out))).unwrap();
    ok(&["sweep", "--config", p(&cfg), "--boundary", "0.7"]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["boundary"], 0.7);
    assert_eq!(report["config"]["grid_step"], 0.5);

    std::fs::write(&cfg, "bogus_key = 1\n").unwrap();
    let bad = regimekit(&["sweep", "--config", p(&cfg)]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bogus_key"));
}

#[test]
fn qtrain_then_qeval() {
    let tmp = tempfile::tempdir().unwrap();
    let uni = tmp.path().join("u");
    ok(&["synth", "--kind", "planted", "--count", "4", "--n", "400", "--seed", "3", "--out", p(&uni)]);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&["qtrain", "--universe", p(&uni), "--out", p(d), "--split-date", "2021-09-01", "--seed", "4"]);
    }
    assert_eq!(std::fs::read(a.join("qtable.json")).unwrap(), std::fs::read(b.join("qtable.json")).unwrap());

    ok(&["qeval", "--universe", p(&uni), "--out", p(&a), "--split-date", "2021-09-01"]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("qeval.json")).unwrap()).unwrap();
    let modes = report["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 2);
    for m in modes {
        assert_eq!(m["symbols"].as_array().unwrap().len(), 4);
    }
    let daily = std::fs::read_to_string(a.join("qeval_daily.csv")).unwrap();
    assert_eq!(daily.lines().next().unwrap(), "symbol,mode,date,action,daily_return");
    assert!(daily.lines().skip(1).all(|l| l.split(',').nth(2).unwrap() >= "2021-09-01"));

    let overlap = regimekit(&["qeval", "--universe", p(&uni), "--out", p(&a), "--eval-from", "2021-03-01"]);
    assert!(!overlap.status.success());
    assert!(String::from_utf8_lossy(&overlap.stderr).contains("overlaps"));
}

#[test]
fn qeval_without_qtable_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let uni = tmp.path().join("u");
    ok(&["synth", "--count", "2", "--out", p(&uni)]);
    let out = regimekit(&["qeval", "--universe", p(&uni), "--out", p(&tmp.path().join("q"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("qtable.json"));
}
