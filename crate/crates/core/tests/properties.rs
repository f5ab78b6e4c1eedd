mod common;

use chrono::Days;
use pairsel::data::{InstrumentId, OhlcvBar, PriceSeries};
use pairsel::evaluation::{
    auc, backtest, format_record_fields, nnp, normalized_acc, parse_record_fields, strategy_returns, DownPosition,
    EvaluationRecord, MetricSet,
};
use pairsel::features::{build_dataset, macd, rsi, FeatureParams, MacdPeriods};
use pairsel::meta::{mean_system_accuracy, train_meta, RecordStore, DEFAULT_VOTERS};
use pairsel::models::{train, Matrix, ModelKind};
use pairsel::seeding::derive_seed;
use pairsel::splits::{chronological_split, part_size};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{date, random_prices};

fn daily_returns(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..20.0, 1..max_len)
}

fn labels_with_both(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, 2..max_len).prop_filter("both classes", |v| v.contains(&0) && v.contains(&1))
}

fn series_from_closes(closes: &[f64], scale: f64) -> PriceSeries<f64> {
    let start = date(2015, 1, 1);
    let bars = closes
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let open = if i == 0 { c } else { closes[i - 1] * 1.001 };
            let (open, close) = (open * scale, c * scale);
            OhlcvBar {
                date: start + Days::new(i as u64),
                open,
                high: open.max(close) * 1.01,
                low: open.min(close) * 0.99,
                close,
                adj_close: close,
                volume: 1000,
            }
        })
        .collect();
    PriceSeries::new(InstrumentId::new("P").unwrap(), bars).unwrap()
}

fn metric_set(v: &[f64]) -> MetricSet<f64> {
    MetricSet {
        accuracy: v[0],
        normalized_acc: v[1],
        precision: v[2],
        recall: v[3],
        f1: v[4],
        auc: v[5],
        pred_pos_rate: v[6],
        backtest_return_pct: v[7],
        nnp_pct: v[8],
    }
}

fn record(i: usize, v: &[f64]) -> EvaluationRecord<f64> {
    EvaluationRecord::new(
        "r0",
        InstrumentId::new(format!("I{}", i % 5)).unwrap(),
        format!("M{i}"),
        (date(2020, 1, 1), date(2020, 3, 1)),
        metric_set(v),
    )
}

fn metric_rows(min: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let row = (prop::collection::vec(0.0f64..1.0, 7), -30.0f64..30.0, -30.0f64..30.0).prop_map(|(mut m, b, n)| {
        m.push(b);
        m.push(n);
        m
    });
    prop::collection::vec(row, min..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn splits_partition_the_range(n in 20usize..5000, test_frac in 0.01f64..0.5, val_frac in 0.01f64..0.5) {
        if let Ok(s) = chronological_split(n, test_frac, val_frac) {
            prop_assert_eq!(s.learn.start, 0);
            prop_assert_eq!(s.learn.end, s.validation.start);
            prop_assert_eq!(s.validation.end, s.test.start);
            prop_assert_eq!(s.test.end, n);
            prop_assert!(!s.learn.is_empty() && !s.validation.is_empty() && !s.test.is_empty());
            prop_assert_eq!(s.test.len(), part_size(n, test_frac));
        }
    }

    #[test]
    fn constant_predictor_has_half_normalized_accuracy(labels in labels_with_both(200), c in 0u8..=1) {
        let preds = vec![c; labels.len()];
        prop_assert_eq!(normalized_acc::<f64>(&preds, &labels).unwrap(), 0.5);
    }

    #[test]
    fn auc_ignores_monotone_rescoring(
        labels in labels_with_both(120),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // coarse scores so that ties occur
        let scores: Vec<f64> = (0..labels.len()).map(|_| (rand::Rng::random_range(&mut rng, 0..10) as f64) / 10.0).collect();
        let warped: Vec<f64> = scores.iter().map(|s| s.powi(3) + 2.0 * s - 7.0).collect();
        let a = auc::<f64>(&scores, &labels).unwrap();
        prop_assert_eq!(a, auc::<f64>(&warped, &labels).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
        let flipped: Vec<f64> = scores.iter().map(|s| -s).collect();
        prop_assert!((auc::<f64>(&flipped, &labels).unwrap() - (1.0 - a)).abs() < 1e-12);
    }

    #[test]
    fn flipping_one_prediction_negates_that_day(
        returns in daily_returns(100),
        seed in any::<u64>(),
        pick in any::<prop::sample::Index>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let preds: Vec<u8> = returns.iter().map(|_| rand::Rng::random_range(&mut rng, 0..=1)).collect();
        let i = pick.index(preds.len());
        let mut flipped = preds.clone();
        flipped[i] = 1 - flipped[i];
        let a = strategy_returns(&preds, &returns, DownPosition::Short).unwrap();
        let b = strategy_returns(&flipped, &returns, DownPosition::Short).unwrap();
        for (j, (x, y)) in a.iter().zip(&b).enumerate() {
            if j == i {
                prop_assert_eq!(*x, -*y);
            } else {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn hindsight_dominates_and_always_long_is_the_baseline(returns in daily_returns(150), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let preds: Vec<u8> = returns.iter().map(|_| rand::Rng::random_range(&mut rng, 0..=1)).collect();
        let perfect: Vec<u8> = returns.iter().map(|&r| u8::from(r > 0.0)).collect();
        for down in [DownPosition::Short, DownPosition::Flat] {
            prop_assert!(backtest(&perfect, &returns, down).unwrap() >= backtest(&preds, &returns, down).unwrap());
            prop_assert_eq!(backtest(&vec![1; returns.len()], &returns, down).unwrap(), nnp(&returns).unwrap());
        }
    }

    #[test]
    fn rsi_is_bounded_and_histogram_is_line_minus_signal(seed in any::<u64>(), n in 40usize..300, period in 2usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let closes = random_prices(&mut rng, n);
        for v in rsi(&closes, period) {
            prop_assert!((0.0..=100.0).contains(&v), "rsi {}", v);
        }
        let m = macd(&closes, MacdPeriods { fast: 12, slow: 26, signal: 9 });
        prop_assert_eq!(m.line.len(), m.signal.len());
        for ((l, s), h) in m.line.iter().zip(&m.signal).zip(&m.histogram) {
            prop_assert_eq!(*h, l - s);
        }
    }

    #[test]
    fn scaling_prices_scales_only_the_price_level_features(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let closes = random_prices(&mut rng, 120);
        let params = FeatureParams::default();
        let a = build_dataset(&series_from_closes(&closes, 1.0), &params).unwrap();
        let b = build_dataset(&series_from_closes(&closes, scale), &params).unwrap();
        prop_assert_eq!(a.len(), b.len());
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()));
        for (s, t) in a.samples.iter().zip(&b.samples) {
            prop_assert_eq!(s.label, t.label);
            prop_assert!(close(s.features.return_pct, t.features.return_pct));
            prop_assert!(close(s.features.rsi, t.features.rsi));
            prop_assert!(close(s.features.sma * scale, t.features.sma));
            prop_assert!(close(s.features.macd_line * scale, t.features.macd_line));
            prop_assert!(close(s.features.signal_line * scale, t.features.signal_line));
            prop_assert!(close(s.features.histogram * scale, t.features.histogram));
        }
    }

    #[test]
    fn mean_system_accuracy_is_two_p_minus_one(p in 0.0f64..=1.0) {
        prop_assert!((mean_system_accuracy(p).unwrap() - (2.0 * p - 1.0)).abs() <= 1e-15);
    }

    #[test]
    fn record_fields_round_trip(rows in metric_rows(1, 20)) {
        for (i, v) in rows.iter().enumerate() {
            let r = record(i, v);
            let line = format_record_fields(&r);
            let fields: Vec<&str> = line.split(',').collect();
            let back = parse_record_fields::<f64>(&r.run_id, (r.window_start, r.window_end), &fields).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn store_load_returns_every_append_in_order(batches in prop::collection::vec(metric_rows(0, 8), 1..5)) {
        let dir = tempfile::tempdir().unwrap();
        let store = RecordStore::open(dir.path().join("s.store"));
        let mut all = Vec::new();
        for batch in &batches {
            let recs: Vec<_> = batch.iter().enumerate().map(|(i, v)| record(all.len() + i, v)).collect();
            store.append(&recs).unwrap();
            all.extend(recs);
        }
        prop_assert_eq!(store.load::<f64>().unwrap(), all);
    }

    #[test]
    fn predictions_agree_with_scores(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..80).map(|_| (0..3).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect()).collect();
        let mut y: Vec<u8> = (0..80).map(|_| rand::Rng::random_range(&mut rng, 0..=1)).collect();
        y[0] = 0;
        y[1] = 1;
        let x = Matrix::from_rows(rows);
        for kind in [ModelKind::LogisticRegression, ModelKind::DecisionTree, ModelKind::KNeighbors, ModelKind::GaussianNB, ModelKind::RandomForest] {
            let m = train(&kind.default_spec(), &x, &y, seed).unwrap();
            for row in x.rows() {
                let s = m.score(row).unwrap();
                prop_assert!((0.0..=1.0).contains(&s));
                prop_assert_eq!(m.predict(row).unwrap(), u8::from(s >= 0.5));
            }
        }
    }

    #[test]
    fn meta_prediction_is_the_majority_of_independent_voters(rows in metric_rows(30, 60), seed in any::<u64>()) {
        let history: Vec<_> = rows.iter().enumerate().map(|(i, v)| record(i, v)).collect();
        let labels: Vec<u8> = history.iter().map(|r| r.profit_label).collect();
        prop_assume!(labels.contains(&0) && labels.contains(&1));
        let meta = train_meta(&history, seed, 30).unwrap();
        let x = Matrix::from_rows(history.iter().map(|r| r.metrics.meta_features()));
        let voters: Vec<_> = DEFAULT_VOTERS
            .iter()
            .map(|k| {
                let spec = k.default_spec();
                train(&spec, &x, &labels, derive_seed(seed, "meta", &spec.canonical_id())).unwrap()
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..30 {
            let probe: Vec<f64> = (0..7).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
            let ones = voters.iter().filter(|v| v.predict(&probe).unwrap() == 1).count();
            prop_assert_eq!(meta.predict(&probe).unwrap(), u8::from(ones >= 2));
            let mean = voters.iter().map(|v| v.score(&probe).unwrap()).sum::<f64>() / 3.0;
            prop_assert!((meta.score(&probe).unwrap() - mean).abs() < 1e-12);
        }
    }
}
