use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use regimekit::marketdata::{
    log_returns, read_csv, synth_ou, synth_persistent, synth_random_walk, write_csv_to, PriceSeries,
};

fn series_strategy() -> impl Strategy<Value = PriceSeries> {
    (
        prop::collection::vec((1i64..5, 1e-6f64..1e6), 1..80),
        0i64..20_000,
    )
        .prop_map(|(steps, offset)| {
            let mut d = NaiveDate::from_ymd_opt(1990, 1, 1).unwrap() + Duration::days(offset);
            let mut dates = Vec::new();
            let mut closes = Vec::new();
            for (gap, px) in steps {
                d += Duration::days(gap);
                dates.push(d);
                closes.push(px);
            }
            PriceSeries::new("P", dates, closes).unwrap()
        })
}

proptest! {
    #[test]
    fn csv_round_trip_is_exact(s in series_strategy()) {
        let mut buf = Vec::new();
        write_csv_to(&s, &mut buf).unwrap();
        let back = read_csv("P", buf.as_slice()).unwrap();
        prop_assert_eq!(back.dates(), s.dates());
        prop_assert_eq!(back.closes(), s.closes());
        // and writing again reproduces the bytes
        let mut again = Vec::new();
        write_csv_to(&back, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn split_parts_concatenate(s in series_strategy(), pick in 0usize..1000) {
        prop_assume!(s.len() >= 2);
        let cut = 1 + pick % (s.len() - 1);
        let (a, b) = s.split_at(s.dates()[cut]).unwrap();
        prop_assert!(a.dates().iter().all(|d| *d < s.dates()[cut]));
        let dates: Vec<_> = a.dates().iter().chain(b.dates()).copied().collect();
        let closes: Vec<_> = a.closes().iter().chain(b.closes()).copied().collect();
        prop_assert_eq!(dates.as_slice(), s.dates());
        prop_assert_eq!(closes.as_slice(), s.closes());
    }

    #[test]
    fn log_returns_telescope(seed in any::<u64>(), n in 2usize..600) {
        let s = synth_random_walk(n, seed, 0.02, 37.0).unwrap();
        let total: f64 = log_returns(&s).unwrap().iter().sum();
        let ratio = s.closes()[n - 1] / s.closes()[0];
        prop_assert!((total.exp() - ratio).abs() <= 1e-12 * ratio);
    }

    #[test]
    fn generators_reproduce(seed in any::<u64>()) {
        prop_assert_eq!(synth_random_walk(100, seed, 0.01, 1.0).unwrap(), synth_random_walk(100, seed, 0.01, 1.0).unwrap());
        prop_assert_eq!(synth_ou(100, seed, 0.3, 0.0, 0.02, 0.0).unwrap(), synth_ou(100, seed, 0.3, 0.0, 0.02, 0.0).unwrap());
        prop_assert_eq!(synth_persistent(100, seed, 0.6, 0.01).unwrap(), synth_persistent(100, seed, 0.6, 0.01).unwrap());
    }
}

#[test]
fn universe_loading_skips_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("GOOD.csv"), "date,close\n2021-01-04,1\n2021-01-05,2\n").unwrap();
    std::fs::write(dir.path().join("BAD.csv"), "date,close\n2021-01-04,-1\n").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let (good, bad) = regimekit::marketdata::load_universe(dir.path()).unwrap();
    assert_eq!(good.len(), 1);
    assert_eq!(good[0].symbol(), "GOOD");
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].0, "BAD");
    assert!(regimekit::marketdata::load_universe(dir.path().join("missing")).is_err());
}
