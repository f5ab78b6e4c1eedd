mod common;

use pairsel::data::InstrumentId;
use pairsel::evaluation::{EvaluationRecord, MetricSet};
use pairsel::meta::{select_pairs, train_meta, MetaDataset, SelectionMode, DEFAULT_MIN_META_RECORDS};
use pairsel::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::date;

/// A record whose profit follows `profitable`; the other metrics are noise.
fn record(rng: &mut ChaCha8Rng, i: usize, mut profitable: impl FnMut(f64) -> bool) -> EvaluationRecord<f64> {
    let normalized_acc: f64 = rng.random_range(0.3..0.7);
    let profit = if profitable(normalized_acc) {
        rng.random_range(0.5..20.0)
    } else {
        -rng.random_range(0.5..20.0)
    };
    EvaluationRecord::new(
        "r",
        InstrumentId::new(format!("S{}", i % 7)).unwrap(),
        format!("K{}", i % 4),
        (date(2021, 1, 4), date(2021, 6, 30)),
        MetricSet {
            accuracy: normalized_acc + rng.random_range(-0.01..0.01),
            normalized_acc,
            precision: rng.random_range(0.0..1.0),
            recall: rng.random_range(0.0..1.0),
            f1: rng.random_range(0.0..1.0),
            auc: rng.random_range(0.0..1.0),
            pred_pos_rate: rng.random_range(0.0..1.0),
            backtest_return_pct: profit,
            nnp_pct: rng.random_range(-10.0..10.0),
        },
    )
}

fn held_out_accuracy(history: &[EvaluationRecord<f64>], held_out: &[EvaluationRecord<f64>], seed: u64) -> f64 {
    let meta = train_meta(history, seed, DEFAULT_MIN_META_RECORDS).unwrap();
    let hits = held_out
        .iter()
        .filter(|r| meta.predict(&r.metrics.meta_features()).unwrap() == r.profit_label)
        .count();
    hits as f64 / held_out.len() as f64
}

#[test]
fn learns_a_planted_profit_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rule = |na: f64| na > 0.5;
    let history: Vec<_> = (0..300).map(|i| record(&mut rng, i, rule)).collect();
    let held_out: Vec<_> = (0..500).map(|i| record(&mut rng, i, rule)).collect();
    let acc = held_out_accuracy(&history, &held_out, 3);
    assert!(acc >= 0.95, "held-out accuracy {acc}");
}

#[test]
fn independent_labels_give_chance_accuracy() {
    let mut total = 0.0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let mut coin = ChaCha8Rng::seed_from_u64(200 + seed);
        let history: Vec<_> = (0..200).map(|i| record(&mut rng, i, |_| coin.random_bool(0.5))).collect();
        let held_out: Vec<_> = (0..200).map(|i| record(&mut rng, i, |_| coin.random_bool(0.5))).collect();
        total += held_out_accuracy(&history, &held_out, seed);
    }
    let mean = total / 20.0;
    assert!((mean - 0.5).abs() <= 0.1, "mean accuracy {mean}");
}

#[test]
fn history_gate_and_duplicates() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rule = |na: f64| na > 0.5;
    let history: Vec<_> = (0..40).map(|i| record(&mut rng, i, rule)).collect();

    assert!(matches!(
        train_meta(&history[..29], 0, DEFAULT_MIN_META_RECORDS),
        Err(Error::InsufficientMetaHistory(_))
    ));
    let mut all_profitable = history.clone();
    all_profitable.retain(|r| r.profit_label == 1);
    assert!(matches!(train_meta(&all_profitable, 0, 1), Err(Error::InsufficientMetaHistory(_))));

    // a duplicated record counts twice
    let mut doubled = history.clone();
    doubled.push(history[0].clone());
    assert_eq!(MetaDataset::from_records(&doubled).len(), 41);
    assert_eq!(train_meta(&doubled, 0, 30).unwrap().trained_on(), 41);

    // retraining on any superset keeps working
    let mut grown = history.clone();
    for i in 0..60 {
        grown.push(record(&mut rng, 40 + i, rule));
        let meta = train_meta(&grown, 9, 30).unwrap();
        assert_eq!(meta.trained_on(), grown.len());
    }
}

#[test]
fn selection_modes_agree_on_the_ranking() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rule = |na: f64| na > 0.5;
    let history: Vec<_> = (0..120).map(|i| record(&mut rng, i, rule)).collect();
    let current: Vec<_> = (0..24).map(|i| record(&mut rng, i, rule)).collect();
    let meta = train_meta(&history, 1, 30).unwrap();

    let list = select_pairs(&meta, &current, SelectionMode::ProfitableList).unwrap();
    let best = select_pairs(&meta, &current, SelectionMode::BestSingle).unwrap();
    let voted: usize = current
        .iter()
        .filter(|r| meta.predict(&r.metrics.meta_features()).unwrap() == 1)
        .count();
    assert_eq!(list.traded().count(), voted);
    assert!(voted > 0);
    assert_eq!(best.entries.len(), 1);
    let top = &best.entries[0];
    let max = current
        .iter()
        .map(|r| meta.score(&r.metrics.meta_features()).unwrap())
        .fold(f64::MIN, f64::max);
    assert_eq!(top.meta_score, max);
    if top.vote == 1 {
        assert_eq!(list.traded().next(), Some(top));
    }
    for e in list.traded() {
        let r = current
            .iter()
            .find(|r| r.instrument == e.instrument && r.model == e.model)
            .unwrap();
        assert_eq!(e.backtest_return_pct, r.metrics.backtest_return_pct);
    }
}
