use std::ops::Range;

use chrono::NaiveDate;
use rayon::prelude::*;

use super::config::{PipelineSettings, RunConfig};
use crate::data::{load_each, PriceSeries};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_pair, EquityCurve, EvaluationRecord, WindowReplay};
use crate::features::{build_dataset, FeatureVector, LabeledDataset};
use crate::meta::{mean_system_accuracy, select_pairs, train_meta, PairSelection, RecordStore, SelectionEntry};
use crate::models::{grid_search, Grid, GridTrial, ModelKind, TrainedClassifier};
use crate::scalar::Scalar;
use crate::seeding::derive_seed;
use crate::splits::{part_size, pre_test_split, SplitView};

/// A loaded instrument with its labeled samples.
#[derive(Clone, Debug)]
pub struct PreparedInstrument<T> {
    pub series: PriceSeries<T>,
    pub dataset: LabeledDataset<T>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkippedInstrument {
    pub instrument: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairFailure {
    pub instrument: String,
    pub kind: ModelKind,
    pub reason: String,
}

/// Replay of a trained pair on its untouched test segment.
#[derive(Clone, Debug)]
pub struct TestOutcome<T> {
    pub window: (NaiveDate, NaiveDate),
    pub accuracy: T,
    pub backtest_return_pct: T,
    pub nnp_pct: T,
    pub profit_label: u8,
    pub equity: EquityCurve<T>,
}

#[derive(Clone, Debug)]
pub struct PairOutcome<T> {
    /// Validation-window record; this is what the store and the meta layer see.
    pub record: EvaluationRecord<T>,
    pub validation_equity: EquityCurve<T>,
    pub grid_trials: Vec<GridTrial>,
    pub model: TrainedClassifier<T>,
    pub test: TestOutcome<T>,
    pub meta_vote: Option<u8>,
    pub meta_score: Option<T>,
}

#[derive(Clone, Debug)]
pub struct SelectedPair<T> {
    pub entry: SelectionEntry<T>,
    pub test: TestOutcome<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary<T> {
    pub window_index: usize,
    pub window_count: usize,
    pub instruments: usize,
    pub kinds: usize,
    pub pairs_ok: usize,
    pub pairs_failed: usize,
    pub store_records: usize,
    /// Records the meta model was fitted on, if it could be trained.
    pub meta_history: Option<usize>,
    /// Share of pairs whose meta vote matches their test-window profit label.
    pub layer2_accuracy: Option<T>,
    pub mean_system_accuracy: Option<T>,
    pub traded: usize,
    pub mean_selected_strategy_pct: Option<T>,
    pub mean_selected_nnp_pct: Option<T>,
}

#[derive(Clone, Debug)]
pub struct RunReport<T> {
    pub run_id: String,
    pub pairs: Vec<PairOutcome<T>>,
    pub failures: Vec<PairFailure>,
    pub skipped: Vec<SkippedInstrument>,
    pub selection: Option<PairSelection<T>>,
    /// Why nothing is traded, when that is the case.
    pub note: Option<String>,
    /// Traded pairs in selection order with their test replay.
    pub selected: Vec<SelectedPair<T>>,
    pub summary: RunSummary<T>,
}

impl<T: Scalar> RunReport<T> {
    pub fn records(&self) -> Vec<EvaluationRecord<T>> {
        self.pairs.iter().map(|p| p.record.clone()).collect()
    }

    pub fn pair(&self, instrument: &str, model: &str) -> Option<&PairOutcome<T>> {
        self.pairs
            .iter()
            .find(|p| p.record.instrument.as_str() == instrument && p.record.model == model)
    }
}

/// Loads and featurizes every instrument, sorted by symbol. Instruments that
/// fail are returned separately with the reason.
pub fn prepare_universe<T: Scalar>(
    config: &RunConfig,
) -> Result<(Vec<PreparedInstrument<T>>, Vec<SkippedInstrument>)> {
    let warmup = config.features.warmup();
    let loaded = load_each::<T>(&config.universe(), warmup + 1)?;
    let mut prepared = Vec::new();
    let mut skipped = Vec::new();
    for (src, outcome) in config.instruments.iter().zip(loaded) {
        let built = outcome.and_then(|series| {
            let dataset = build_dataset(&series, &config.features)
                .map_err(|e| Error::for_instrument(series.instrument().as_str(), e))?;
            Ok(PreparedInstrument { series, dataset })
        });
        match built {
            Ok(p) => prepared.push(p),
            Err(e) => {
                log::warn!("skipping instrument {}: {e}", src.symbol);
                skipped.push(SkippedInstrument {
                    instrument: src.symbol.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    prepared.sort_by(|a, b| a.dataset.instrument.cmp(&b.dataset.instrument));
    skipped.sort_by(|a, b| a.instrument.cmp(&b.instrument));
    if prepared.is_empty() {
        return Err(Error::Config("no instrument could be loaded".into()));
    }
    Ok((prepared, skipped))
}

/// Split of window `index` out of `count` over `n` samples. The last
/// `count * len` samples form consecutive test segments; everything before a
/// segment is its learn and validation data.
pub fn window_split(n: usize, settings: &PipelineSettings, index: usize, count: usize) -> Option<SplitView> {
    if index >= count {
        return None;
    }
    let len = settings.window_len.unwrap_or_else(|| part_size(n, settings.test_frac));
    if len == 0 || count.checked_mul(len)? >= n {
        return None;
    }
    let start = n - (count - index) * len;
    pre_test_split(start, settings.val_frac, start..start + len)
}

fn plan_windows<T: Scalar>(
    prepared: &[PreparedInstrument<T>],
    settings: &PipelineSettings,
    count: usize,
) -> Result<Vec<Vec<SplitView>>> {
    prepared
        .iter()
        .map(|p| {
            (0..count)
                .map(|w| {
                    window_split(p.dataset.len(), settings, w, count).ok_or_else(|| {
                        Error::Config(format!(
                            "instrument {}: {} samples cannot hold {count} test windows with non-empty splits",
                            p.dataset.instrument,
                            p.dataset.len()
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

fn dates<T: Scalar>(dataset: &LabeledDataset<T>, range: &Range<usize>) -> (NaiveDate, NaiveDate) {
    (dataset.samples[range.start].target_date, dataset.samples[range.end - 1].target_date)
}

fn run_pair<T: Scalar>(
    config: &RunConfig,
    seed: u64,
    inst: &PreparedInstrument<T>,
    grid: &Grid,
    split: &SplitView,
    run_id: &str,
) -> Result<PairOutcome<T>> {
    let ds = &inst.dataset;
    let learn = ds.design(split.learn.clone());
    let val = ds.design(split.validation.clone());
    let found = grid_search(grid, (&learn.0, &learn.1), (&val.0, &val.1), seed, ds.instrument.as_str())?;
    let down = config.down_position();
    let validation = evaluate_pair(&found.model, ds, split.validation.clone(), down, run_id)?;
    let replay = WindowReplay::run(&found.model, ds, split.test.clone())?;
    let backtest_return_pct = replay.backtest(down)?;
    let test = TestOutcome {
        window: dates(ds, &split.test),
        accuracy: replay.accuracy(),
        backtest_return_pct,
        nnp_pct: replay.nnp()?,
        profit_label: u8::from(backtest_return_pct > T::zero()),
        equity: replay.equity_curve(down)?,
    };
    Ok(PairOutcome {
        record: validation.record,
        validation_equity: validation.equity,
        grid_trials: found.trials,
        model: found.model,
        test,
        meta_vote: None,
        meta_score: None,
    })
}

fn mean<T: Scalar>(xs: impl Iterator<Item = T>) -> Option<T> {
    let (sum, n) = xs.fold((T::zero(), 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / T::from_count(n))
}

/// One training cycle on window `index` of `count` over already prepared data.
pub fn run_window<T: Scalar>(
    config: &RunConfig,
    prepared: &[PreparedInstrument<T>],
    skipped: &[SkippedInstrument],
    index: usize,
    count: usize,
    store: &RecordStore,
) -> Result<RunReport<T>> {
    let seed = config.master_seed()?;
    let plan = plan_windows(prepared, &config.pipeline, count)?;
    let grids = config.grids();
    let existing = store.load::<T>()?;
    let run_id = format!(
        "{:016x}",
        derive_seed(seed, "run", &format!("window={index}/{count};history={}", existing.len()))
    );
    log::info!(
        "window {}/{count}: {} instruments x {} kinds, run {run_id}",
        index + 1,
        prepared.len(),
        grids.len()
    );

    let jobs: Vec<(usize, &Grid)> = (0..prepared.len())
        .flat_map(|i| grids.iter().map(move |g| (i, g)))
        .collect();
    let results: Vec<std::result::Result<PairOutcome<T>, PairFailure>> = jobs
        .par_iter()
        .map(|&(i, grid)| {
            let inst = &prepared[i];
            run_pair(config, seed, inst, grid, &plan[i][index], &run_id).map_err(|e| PairFailure {
                instrument: inst.dataset.instrument.to_string(),
                kind: grid.kind,
                reason: e.to_string(),
            })
        })
        .collect();
    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(p) => pairs.push(p),
            Err(f) => {
                log::warn!("pair {} / {} failed: {}", f.instrument, f.kind.name(), f.reason);
                failures.push(f);
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Config(format!(
            "no instrument-model pair survived window {}: {}",
            index + 1,
            failures
                .iter()
                .map(|f| format!("{}/{}: {}", f.instrument, f.kind.name(), f.reason))
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }

    let records: Vec<EvaluationRecord<T>> = pairs.iter().map(|p| p.record.clone()).collect();
    store.append(&records)?;
    let store_records = existing.len() + records.len();

    // The voter only learns from earlier runs; this run's pairs are what it judges.
    let meta = match train_meta(&existing, seed, config.pipeline.min_meta_records) {
        Ok(m) => Some(m),
        Err(Error::InsufficientMetaHistory(why)) => {
            log::warn!("window {}: insufficient meta history ({why}); no trade", index + 1);
            None
        }
        Err(e) => return Err(e),
    };

    let mut selection = None;
    let mut selected = Vec::new();
    let mut note = None;
    let mut layer2_accuracy = None;
    match &meta {
        Some(meta) => {
            for p in pairs.iter_mut() {
                let f = p.record.metrics.meta_features();
                p.meta_vote = Some(meta.predict(&f)?);
                p.meta_score = Some(meta.score(&f)?);
            }
            let hits = pairs
                .iter()
                .filter(|p| p.meta_vote == Some(p.test.profit_label))
                .count();
            layer2_accuracy = Some(T::from_count(hits) / T::from_count(pairs.len()));
            let sel = select_pairs(meta, &records, config.pipeline.selection_mode)?;
            for entry in sel.traded() {
                let outcome = pairs
                    .iter()
                    .find(|p| p.record.instrument == entry.instrument && p.record.model == entry.model)
                    .expect("selection entries come from this run's pairs");
                selected.push(SelectedPair {
                    entry: entry.clone(),
                    test: outcome.test.clone(),
                });
            }
            if sel.is_no_trade() {
                note = Some("no pair voted profitable; no trade".to_string());
            }
            selection = Some(sel);
        }
        None => note = Some("insufficient meta history; no trade".to_string()),
    }

    let summary = RunSummary {
        window_index: index,
        window_count: count,
        instruments: prepared.len(),
        kinds: grids.len(),
        pairs_ok: pairs.len(),
        pairs_failed: failures.len(),
        store_records,
        meta_history: meta.as_ref().map(|m| m.trained_on()),
        layer2_accuracy,
        mean_system_accuracy: layer2_accuracy.map(mean_system_accuracy).transpose()?,
        traded: selected.len(),
        mean_selected_strategy_pct: mean(selected.iter().map(|s| s.test.backtest_return_pct)),
        mean_selected_nnp_pct: mean(selected.iter().map(|s| s.test.nnp_pct)),
    };
    Ok(RunReport {
        run_id,
        pairs,
        failures,
        skipped: skipped.to_vec(),
        selection,
        note,
        selected,
        summary,
    })
}

/// Replays `n_windows` consecutive test segments, retraining before each one.
/// The record store grows across windows.
pub fn walk_forward<T: Scalar>(config: &RunConfig, n_windows: usize) -> Result<Vec<RunReport<T>>> {
    if n_windows == 0 {
        return Err(Error::Config("walk-forward needs at least one window".into()));
    }
    config.validate()?;
    let store = RecordStore::open(config.store_path()?);
    let (prepared, skipped) = prepare_universe::<T>(config)?;
    plan_windows(&prepared, &config.pipeline, n_windows)?;
    (0..n_windows)
        .map(|w| run_window(config, &prepared, &skipped, w, n_windows, &store))
        .collect()
}

pub fn run_training_cycle<T: Scalar>(config: &RunConfig) -> Result<RunReport<T>> {
    Ok(walk_forward(config, 1)?.pop().expect("one window"))
}

/// Next-day call of a traded pair from the latest available bar.
#[derive(Clone, Debug, PartialEq)]
pub struct NextDayCall<T> {
    pub instrument: String,
    pub model: String,
    pub as_of: NaiveDate,
    pub score: T,
    pub direction: u8,
}

/// Runs one cycle, then asks each traded pair's model about the day after
/// the last bar.
pub fn predict_next<T: Scalar>(config: &RunConfig) -> Result<(RunReport<T>, Vec<NextDayCall<T>>)> {
    config.validate()?;
    let store = RecordStore::open(config.store_path()?);
    let (prepared, skipped) = prepare_universe::<T>(config)?;
    let report = run_window(config, &prepared, &skipped, 0, 1, &store)?;
    let calls = report
        .selected
        .iter()
        .map(|s| {
            let inst = prepared
                .iter()
                .find(|p| p.dataset.instrument == s.entry.instrument)
                .expect("selected instrument was prepared");
            let model = &report
                .pair(s.entry.instrument.as_str(), &s.entry.model)
                .expect("selected pair exists")
                .model;
            let x: FeatureVector<T> = inst.dataset.next_features;
            let score = model.score(&x.to_array())?;
            Ok(NextDayCall {
                instrument: s.entry.instrument.to_string(),
                model: s.entry.model.clone(),
                as_of: inst.dataset.last_date,
                score,
                direction: u8::from(score >= T::half()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((report, calls))
}
