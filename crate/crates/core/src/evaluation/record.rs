use std::fmt::Write as _;

use chrono::NaiveDate;

use crate::data::InstrumentId;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const RECORD_COLUMNS: [&str; 12] = [
    "dataset",
    "model",
    "accuracy",
    "normalized_acc",
    "precision",
    "recall",
    "f1",
    "auc",
    "pred_pos_rate",
    "backtest_return_pct",
    "nnp_pct",
    "profit_label",
];

pub const META_FEATURE_COUNT: usize = 7;
pub const META_FEATURE_NAMES: [&str; META_FEATURE_COUNT] =
    ["accuracy", "normalized_acc", "precision", "recall", "f1", "auc", "pred_pos_rate"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSet<T> {
    pub accuracy: T,
    pub normalized_acc: T,
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub auc: T,
    pub pred_pos_rate: T,
    pub backtest_return_pct: T,
    pub nnp_pct: T,
}

impl<T: Scalar> MetricSet<T> {
    /// Inputs of the second layer. The two return columns are left out
    /// because the profit label is computed from them.
    pub fn meta_features(&self) -> [T; META_FEATURE_COUNT] {
        [
            self.accuracy,
            self.normalized_acc,
            self.precision,
            self.recall,
            self.f1,
            self.auc,
            self.pred_pos_rate,
        ]
    }

    fn values(&self) -> [T; 9] {
        [
            self.accuracy,
            self.normalized_acc,
            self.precision,
            self.recall,
            self.f1,
            self.auc,
            self.pred_pos_rate,
            self.backtest_return_pct,
            self.nnp_pct,
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationRecord<T> {
    pub run_id: String,
    pub instrument: InstrumentId,
    pub model: String,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub metrics: MetricSet<T>,
    pub profit_label: u8,
}

impl<T: Scalar> EvaluationRecord<T> {
    pub fn new(
        run_id: &str,
        instrument: InstrumentId,
        model: String,
        window: (NaiveDate, NaiveDate),
        metrics: MetricSet<T>,
    ) -> Self {
        EvaluationRecord {
            run_id: run_id.to_string(),
            instrument,
            model,
            window_start: window.0,
            window_end: window.1,
            profit_label: u8::from(metrics.backtest_return_pct > T::zero()),
            metrics,
        }
    }
}

/// The [`RECORD_COLUMNS`] fields of a record, comma separated.
pub fn format_record_fields<T: Scalar>(r: &EvaluationRecord<T>) -> String {
    let mut line = format!("{},{}", r.instrument, r.model);
    for v in r.metrics.values() {
        write!(line, ",{v}").expect("write to String");
    }
    write!(line, ",{}", r.profit_label).expect("write to String");
    line
}

/// Inverse of [`format_record_fields`] with the run fields supplied separately.
pub fn parse_record_fields<T: Scalar>(
    run_id: &str,
    window: (NaiveDate, NaiveDate),
    fields: &[&str],
) -> Result<EvaluationRecord<T>> {
    if fields.len() != RECORD_COLUMNS.len() {
        return Err(Error::Persistence(format!(
            "expected {} record fields, found {}",
            RECORD_COLUMNS.len(),
            fields.len()
        )));
    }
    let num = |i: usize| -> Result<T> {
        fields[i]
            .parse::<T>()
            .map_err(|_| Error::Persistence(format!("bad {} value {:?}", RECORD_COLUMNS[i], fields[i])))
    };
    let metrics = MetricSet {
        accuracy: num(2)?,
        normalized_acc: num(3)?,
        precision: num(4)?,
        recall: num(5)?,
        f1: num(6)?,
        auc: num(7)?,
        pred_pos_rate: num(8)?,
        backtest_return_pct: num(9)?,
        nnp_pct: num(10)?,
    };
    let profit_label = match fields[11] {
        "0" => 0,
        "1" => 1,
        other => return Err(Error::Persistence(format!("bad profit_label {other:?}"))),
    };
    if profit_label != u8::from(metrics.backtest_return_pct > T::zero()) {
        return Err(Error::Persistence("profit_label disagrees with backtest_return_pct".into()));
    }
    Ok(EvaluationRecord {
        run_id: run_id.to_string(),
        instrument: InstrumentId::new(fields[0]).map_err(|e| Error::Persistence(e.to_string()))?,
        model: fields[1].to_string(),
        window_start: window.0,
        window_end: window.1,
        metrics,
        profit_label,
    })
}

/// Records in [`RECORD_COLUMNS`] order, with a header line.
pub fn records_csv<T: Scalar>(records: &[EvaluationRecord<T>]) -> String {
    let mut out = RECORD_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        out.push_str(&format_record_fields(r));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(backtest: f64) -> EvaluationRecord<f64> {
        let d = NaiveDate::from_ymd_opt(2020, 1, 2).unwrap();
        EvaluationRecord::new(
            "r1",
            InstrumentId::new("AAPL").unwrap(),
            "LogisticRegression(C=0.1;max_iter=10000;tol=0.000001)".into(),
            (d, d),
            MetricSet {
                accuracy: 0.519,
                normalized_acc: 0.492,
                precision: 0.5,
                recall: 0.25,
                f1: 1.0 / 3.0,
                auc: 0.48,
                pred_pos_rate: 0.3,
                backtest_return_pct: backtest,
                nnp_pct: 1.1,
            },
        )
    }

    #[test]
    fn profit_label_is_strictly_positive_backtest() {
        assert_eq!(sample(-0.77).profit_label, 0);
        assert_eq!(sample(0.0).profit_label, 0);
        assert_eq!(sample(1e-9).profit_label, 1);
    }

    #[test]
    fn fields_round_trip() {
        let r = sample(-0.77);
        let line = format_record_fields(&r);
        let fields: Vec<&str> = line.split(',').collect();
        let back: EvaluationRecord<f64> = parse_record_fields("r1", (r.window_start, r.window_end), &fields).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_header_order() {
        let csv = records_csv(&[sample(2.0)]);
        assert!(csv.starts_with(
            "dataset,model,accuracy,normalized_acc,precision,recall,f1,auc,pred_pos_rate,backtest_return_pct,nnp_pct,profit_label\n"
        ));
        assert_eq!(csv.lines().count(), 2);
    }
}
