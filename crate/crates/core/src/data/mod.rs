//! Instrument universe and daily OHLCV series.

mod ohlcv_csv;
mod synthetic;
mod universe;

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use ohlcv_csv::{parse_ohlcv_csv, read_ohlcv_file, serialize_ohlcv_csv, write_ohlcv_file, OHLCV_HEADER};
pub use synthetic::{generate_synthetic_series, SyntheticKind, SyntheticSpec, MIN_SYNTHETIC_LENGTH};
pub use universe::{load_each, load_universe, DataSource, InstrumentSource, UniverseConfig};

/// Ticker symbol, e.g. `AAPL` or `GC=F`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct InstrumentId(String);

impl InstrumentId {
    pub fn new(symbol: impl Into<String>) -> Result<Self> {
        let symbol = symbol.into();
        let trimmed = symbol.trim();
        if trimmed.is_empty() {
            return Err(Error::Config("instrument symbol must be non-empty".into()));
        }
        if trimmed.contains([',', '\n', '\r']) {
            return Err(Error::Config(format!(
                "instrument symbol {trimmed:?} contains a delimiter character"
            )));
        }
        Ok(InstrumentId(trimmed.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Symbol restricted to `[A-Za-z0-9._-]`, for use in file names.
    pub fn file_stem(&self) -> String {
        self.0
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                    c
                } else {
                    '_'
                }
            })
            .collect()
    }
}

impl TryFrom<String> for InstrumentId {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        InstrumentId::new(value)
    }
}

impl From<InstrumentId> for String {
    fn from(value: InstrumentId) -> Self {
        value.0
    }
}

impl fmt::Display for InstrumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OhlcvBar<T> {
    pub date: NaiveDate,
    pub open: T,
    pub high: T,
    pub low: T,
    pub close: T,
    pub adj_close: T,
    pub volume: u64,
}

/// Bars whose low or high sit more than 50% away from the close.
const OUTLIER_RATIO: f64 = 0.5;

impl<T: Scalar> OhlcvBar<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::InvalidBar {
            date: self.date,
            message,
        };
        for (name, v) in [
            ("open", self.open),
            ("high", self.high),
            ("low", self.low),
            ("close", self.close),
            ("adj_close", self.adj_close),
        ] {
            if !v.is_finite() || v <= T::zero() {
                return Err(bad(format!("{name} must be a positive finite price, got {v}")));
            }
        }
        if self.low > self.high {
            return Err(bad(format!("low {} > high {}", self.low, self.high)));
        }
        if self.high < self.open.max(self.close) {
            return Err(bad(format!(
                "high {} below max(open, close) {}",
                self.high,
                self.open.max(self.close)
            )));
        }
        if self.low > self.open.min(self.close) {
            return Err(bad(format!(
                "low {} above min(open, close) {}",
                self.low,
                self.open.min(self.close)
            )));
        }
        Ok(())
    }

    pub fn is_outlier(&self) -> bool {
        let limit = T::lit(OUTLIER_RATIO);
        (self.low / self.close - T::one()).abs() > limit
            || (self.high / self.close - T::one()).abs() > limit
    }
}

/// Validated, strictly date-ordered bars for one instrument.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries<T> {
    instrument: InstrumentId,
    bars: Vec<OhlcvBar<T>>,
}

impl<T: Scalar> PriceSeries<T> {
    /// Sorts by date and validates every bar. Duplicate dates are rejected.
    pub fn new(instrument: InstrumentId, mut bars: Vec<OhlcvBar<T>>) -> Result<Self> {
        if bars.is_empty() {
            return Err(Error::InsufficientLength {
                required: 1,
                actual: 0,
            });
        }
        bars.sort_by_key(|b| b.date);
        for pair in bars.windows(2) {
            if pair[0].date == pair[1].date {
                return Err(Error::DuplicateDate(pair[0].date));
            }
        }
        for bar in &bars {
            bar.validate()?;
            if bar.is_outlier() {
                log::warn!("{instrument}: bar on {} looks like a bad tick", bar.date);
            }
        }
        Ok(PriceSeries { instrument, bars })
    }

    pub fn instrument(&self) -> &InstrumentId {
        &self.instrument
    }

    pub fn bars(&self) -> &[OhlcvBar<T>] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn closes(&self) -> Vec<T> {
        self.bars.iter().map(|b| b.close).collect()
    }

    pub fn outlier_dates(&self) -> Vec<NaiveDate> {
        self.bars
            .iter()
            .filter(|b| b.is_outlier())
            .map(|b| b.date)
            .collect()
    }

    /// First `len` bars as a new series.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        let len = len.min(self.bars.len());
        PriceSeries::new(self.instrument.clone(), self.bars[..len].to_vec())
    }

    /// Replaces the bars, keeping the instrument. Used to build perturbed copies.
    pub fn with_bars(&self, bars: Vec<OhlcvBar<T>>) -> Result<Self> {
        PriceSeries::new(self.instrument.clone(), bars)
    }
}
