//! The evaluation layer: metric vectors, backtest returns and equity curves
//! for one trained (instrument, model) pair on one window.

mod backtest;
mod metrics;
mod record;

use std::ops::Range;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::features::LabeledDataset;
use crate::models::TrainedClassifier;
use crate::scalar::Scalar;

pub use backtest::{backtest, compound, cumulative, nnp, strategy_returns, DownPosition};
pub use metrics::{auc, confusion_metrics, normalized_acc, pred_pos_rate, ConfusionCounts, ConfusionMetrics};
pub use record::{
    format_record_fields, parse_record_fields, records_csv, EvaluationRecord, MetricSet, META_FEATURE_COUNT,
    META_FEATURE_NAMES, RECORD_COLUMNS,
};

/// Cumulative strategy and buy-and-hold returns, one point per day.
#[derive(Clone, Debug, PartialEq)]
pub struct EquityCurve<T> {
    pub dates: Vec<NaiveDate>,
    pub strategy_cum_pct: Vec<T>,
    pub normal_cum_pct: Vec<T>,
}

impl<T: Scalar> EquityCurve<T> {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,strategy_cum_pct,normal_cum_pct\n");
        for ((d, s), n) in self.dates.iter().zip(&self.strategy_cum_pct).zip(&self.normal_cum_pct) {
            out.push_str(&format!("{d},{s},{n}\n"));
        }
        out
    }
}

/// Raw outputs of a model replayed over a window.
#[derive(Clone, Debug)]
pub struct WindowReplay<T> {
    pub dates: Vec<NaiveDate>,
    pub scores: Vec<T>,
    pub predictions: Vec<u8>,
    pub labels: Vec<u8>,
    pub returns: Vec<T>,
}

impl<T: Scalar> WindowReplay<T> {
    pub fn run(model: &TrainedClassifier<T>, dataset: &LabeledDataset<T>, range: Range<usize>) -> Result<Self> {
        if range.is_empty() || range.end > dataset.len() {
            return Err(Error::InsufficientLength {
                required: range.end.max(1),
                actual: dataset.len(),
            });
        }
        let (x, labels) = dataset.design(range.clone());
        let scores = model.score_batch(&x)?;
        let predictions = scores.iter().map(|s| u8::from(*s >= T::half())).collect();
        Ok(WindowReplay {
            dates: dataset.samples[range.clone()].iter().map(|s| s.target_date).collect(),
            scores,
            predictions,
            labels,
            returns: dataset.returns(range),
        })
    }

    pub fn accuracy(&self) -> T {
        let hits = self.predictions.iter().zip(&self.labels).filter(|(p, l)| p == l).count();
        T::from_count(hits) / T::from_count(self.labels.len())
    }

    pub fn equity_curve(&self, down: DownPosition) -> Result<EquityCurve<T>> {
        Ok(EquityCurve {
            dates: self.dates.clone(),
            strategy_cum_pct: cumulative(&strategy_returns(&self.predictions, &self.returns, down)?),
            normal_cum_pct: cumulative(&self.returns),
        })
    }

    pub fn backtest(&self, down: DownPosition) -> Result<T> {
        backtest(&self.predictions, &self.returns, down)
    }

    pub fn nnp(&self) -> Result<T> {
        nnp(&self.returns)
    }

    /// Full metric set. Fails when the window holds a single label class.
    pub fn metrics(&self, down: DownPosition) -> Result<MetricSet<T>> {
        let c = confusion_metrics(&self.predictions, &self.labels)?;
        Ok(MetricSet {
            accuracy: c.accuracy,
            normalized_acc: normalized_acc(&self.predictions, &self.labels)?,
            precision: c.precision,
            recall: c.recall,
            f1: c.f1,
            auc: auc(&self.scores, &self.labels)?,
            pred_pos_rate: pred_pos_rate(&self.predictions),
            backtest_return_pct: self.backtest(down)?,
            nnp_pct: self.nnp()?,
        })
    }
}

/// A scored pair together with its equity curve over the same window.
#[derive(Clone, Debug)]
pub struct PairEvaluation<T> {
    pub record: EvaluationRecord<T>,
    pub equity: EquityCurve<T>,
}

/// Scores `model` on `range` of its own instrument's dataset.
pub fn evaluate_pair<T: Scalar>(
    model: &TrainedClassifier<T>,
    dataset: &LabeledDataset<T>,
    range: Range<usize>,
    down: DownPosition,
    run_id: &str,
) -> Result<PairEvaluation<T>> {
    let replay = WindowReplay::run(model, dataset, range)?;
    let metrics = replay.metrics(down)?;
    Ok(PairEvaluation {
        record: EvaluationRecord::new(
            run_id,
            dataset.instrument.clone(),
            model.canonical_id(),
            (replay.dates[0], *replay.dates.last().expect("non-empty window")),
            metrics,
        ),
        equity: replay.equity_curve(down)?,
    })
}
