use std::fmt::Write as _;
use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::indicators::{compute_return, macd, rsi, sma, MacdPeriods};
use crate::data::{InstrumentId, PriceSeries};
use crate::error::{Error, Result};
use crate::models::Matrix;
use crate::scalar::Scalar;

pub const FEATURE_COUNT: usize = 6;
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] =
    ["return_pct", "sma", "rsi", "macd", "signal", "histogram"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureParams {
    pub sma_period: usize,
    pub rsi_period: usize,
    pub macd_fast: usize,
    pub macd_slow: usize,
    pub macd_signal: usize,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            sma_period: 14,
            rsi_period: 14,
            macd_fast: 12,
            macd_slow: 26,
            macd_signal: 9,
        }
    }
}

impl FeatureParams {
    pub fn macd_periods(&self) -> MacdPeriods {
        MacdPeriods {
            fast: self.macd_fast,
            slow: self.macd_slow,
            signal: self.macd_signal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sma_period == 0 || self.rsi_period == 0 || self.macd_signal == 0 {
            return Err(Error::Config("indicator periods must be at least 1".into()));
        }
        if self.macd_fast == 0 || self.macd_fast >= self.macd_slow {
            return Err(Error::Config(format!(
                "MACD needs 0 < fast < slow, got fast={} slow={}",
                self.macd_fast, self.macd_slow
            )));
        }
        Ok(())
    }

    /// Index of the first bar whose features are all defined.
    pub fn first_feature_index(&self) -> usize {
        (self.sma_period - 1)
            .max(self.rsi_period)
            .max(self.macd_periods().offset())
    }

    /// Index of the first target day; features are taken from the previous bar.
    pub fn warmup(&self) -> usize {
        self.first_feature_index() + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub return_pct: T,
    pub sma: T,
    pub rsi: T,
    pub macd_line: T,
    pub signal_line: T,
    pub histogram: T,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn to_array(&self) -> [T; FEATURE_COUNT] {
        [
            self.return_pct,
            self.sma,
            self.rsi,
            self.macd_line,
            self.signal_line,
            self.histogram,
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample<T> {
    pub target_date: NaiveDate,
    /// Computed from bars strictly before `target_date`.
    pub features: FeatureVector<T>,
    /// 1 when the target day's open-to-close return is strictly positive.
    pub label: u8,
    pub realized_return_pct: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    pub instrument: InstrumentId,
    pub samples: Vec<LabeledSample<T>>,
    /// Features of the final bar, i.e. the inputs for the day after the data ends.
    pub next_features: FeatureVector<T>,
    pub last_date: NaiveDate,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn design(&self, range: Range<usize>) -> (Matrix<T>, Vec<u8>) {
        let slice = &self.samples[range];
        let x = Matrix::from_rows(slice.iter().map(|s| s.features.to_array()));
        let y = slice.iter().map(|s| s.label).collect();
        (x, y)
    }

    pub fn labels(&self, range: Range<usize>) -> Vec<u8> {
        self.samples[range].iter().map(|s| s.label).collect()
    }

    pub fn returns(&self, range: Range<usize>) -> Vec<T> {
        self.samples[range].iter().map(|s| s.realized_return_pct).collect()
    }
}

/// Builds one sample per target day from the warmup onward. Features for a
/// target day come from the previous bar only.
pub fn build_dataset<T: Scalar>(series: &PriceSeries<T>, params: &FeatureParams) -> Result<LabeledDataset<T>> {
    params.validate()?;
    let warmup = params.warmup();
    let bars = series.bars();
    if bars.len() < warmup + 1 {
        return Err(Error::InsufficientLength {
            required: warmup + 1,
            actual: bars.len(),
        });
    }

    let returns = bars
        .iter()
        .map(|b| compute_return(b.open, b.close))
        .collect::<Result<Vec<T>>>()?;
    let closes = series.closes();
    let sma_values = sma(&closes, params.sma_period);
    let rsi_values = rsi(&closes, params.rsi_period);
    let macd_periods = params.macd_periods();
    let macd_values = macd(&closes, macd_periods);

    let sma_offset = params.sma_period - 1;
    let rsi_offset = params.rsi_period;
    let macd_offset = macd_periods.offset();

    let features_at = |i: usize| -> Result<FeatureVector<T>> {
        let fv = FeatureVector {
            return_pct: returns[i],
            sma: sma_values[i - sma_offset],
            rsi: rsi_values[i - rsi_offset],
            macd_line: macd_values.line[i - macd_offset],
            signal_line: macd_values.signal[i - macd_offset],
            histogram: macd_values.histogram[i - macd_offset],
        };
        if fv.to_array().iter().all(|v| v.is_finite()) {
            Ok(fv)
        } else {
            Err(Error::NonFinite)
        }
    };

    let samples = (warmup..bars.len())
        .map(|t| {
            Ok(LabeledSample {
                target_date: bars[t].date,
                features: features_at(t - 1)?,
                label: u8::from(returns[t] > T::zero()),
                realized_return_pct: returns[t],
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(LabeledDataset {
        instrument: series.instrument().clone(),
        samples,
        next_features: features_at(bars.len() - 1)?,
        last_date: bars[bars.len() - 1].date,
    })
}

/// Debug dump: `target_date,return_pct,sma,rsi,macd,signal,histogram,label`.
pub fn feature_frame_csv<T: Scalar>(dataset: &LabeledDataset<T>) -> String {
    let mut out = String::from("target_date,return_pct,sma,rsi,macd,signal,histogram,label\n");
    for s in &dataset.samples {
        let f = &s.features;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.target_date.format("%Y-%m-%d"),
            f.return_pct,
            f.sma,
            f.rsi,
            f.macd_line,
            f.signal_line,
            f.histogram,
            s.label
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic_series, OhlcvBar, SyntheticSpec};
    use crate::features::DEFAULT_WARMUP;

    fn synthetic(len: usize, seed: u64) -> PriceSeries<f64> {
        generate_synthetic_series(
            &SyntheticSpec::random_walk(len.max(200), seed),
            InstrumentId::new("T").unwrap(),
        )
        .unwrap()
        .truncated(len)
        .unwrap()
    }

    #[test]
    fn default_warmup_is_34() {
        assert_eq!(FeatureParams::default().warmup(), DEFAULT_WARMUP);
    }

    #[test]
    fn first_sample_and_labels() {
        let series = synthetic(200, 1);
        let ds = build_dataset(&series, &FeatureParams::default()).unwrap();
        assert_eq!(ds.len(), 200 - 34);
        assert_eq!(ds.samples[0].target_date, series.bars()[34].date);
        for (k, s) in ds.samples.iter().enumerate() {
            let bar = &series.bars()[34 + k];
            let prev = &series.bars()[33 + k];
            let r = (bar.close - bar.open) / bar.open * 100.0;
            assert_eq!(s.label, u8::from(r > 0.0));
            assert_eq!(s.features.return_pct, (prev.close - prev.open) / prev.open * 100.0);
        }
        let last = series.bars().last().unwrap();
        assert_eq!(ds.next_features.return_pct, (last.close - last.open) / last.open * 100.0);
    }

    #[test]
    fn zero_return_labels_zero() {
        let series = synthetic(120, 4);
        let mut bars = series.bars().to_vec();
        let t = 80;
        bars[t].close = bars[t].open;
        bars[t].adj_close = bars[t].open;
        let s = series.with_bars(bars).unwrap();
        let ds = build_dataset(&s, &FeatureParams::default()).unwrap();
        let sample = &ds.samples[t - 34];
        assert_eq!(sample.realized_return_pct, 0.0);
        assert_eq!(sample.label, 0);
    }

    #[test]
    fn too_short_series_names_minimum() {
        let series = synthetic(34, 2);
        match build_dataset(&series, &FeatureParams::default()) {
            Err(Error::InsufficientLength { required, actual }) => {
                assert_eq!((required, actual), (35, 34))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncation_leaves_earlier_samples_untouched() {
        let series = synthetic(300, 8);
        let full = build_dataset(&series, &FeatureParams::default()).unwrap();
        for cut in [35, 36, 77, 150, 299] {
            let part = build_dataset(&series.truncated(cut).unwrap(), &FeatureParams::default()).unwrap();
            assert_eq!(part.samples[..], full.samples[..part.len()]);
        }
    }

    #[test]
    fn positive_return_labels_one() {
        let series = synthetic(100, 3);
        let mut bars: Vec<OhlcvBar<f64>> = series.bars().to_vec();
        let b = &mut bars[60];
        b.close = b.open * 1.004;
        b.high = b.close * 1.001;
        b.low = b.open * 0.999;
        let ds = build_dataset(&series.with_bars(bars).unwrap(), &FeatureParams::default()).unwrap();
        assert_eq!(ds.samples[60 - 34].label, 1);
    }

    #[test]
    fn frame_dump_has_header_and_rows() {
        let ds = build_dataset(&synthetic(60, 5), &FeatureParams::default()).unwrap();
        let text = feature_frame_csv(&ds);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "target_date,return_pct,sma,rsi,macd,signal,histogram,label");
        assert_eq!(lines.count(), ds.len());
    }

    #[test]
    fn invalid_params_rejected() {
        let p = FeatureParams {
            macd_fast: 30,
            ..FeatureParams::default()
        };
        assert!(build_dataset(&synthetic(200, 1), &p).is_err());
    }
}
