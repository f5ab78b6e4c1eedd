use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use super::{InstrumentId, OhlcvBar, PriceSeries};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const OHLCV_HEADER: [&str; 7] = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"];

const DATE_FORMAT: &str = "%Y-%m-%d";

/// Parses a `Date,Open,High,Low,Close,Adj Close,Volume` CSV into a validated
/// series. Rows may be in any order; duplicated dates are rejected.
pub fn parse_ohlcv_csv<T: Scalar>(raw: &[u8], instrument: InstrumentId) -> Result<PriceSeries<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(raw);

    let header = reader.headers().map_err(|e| Error::Parse {
        row: 1,
        message: e.to_string(),
    })?;
    let header: Vec<&str> = header.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    if header != OHLCV_HEADER {
        return Err(Error::Parse {
            row: 1,
            message: format!("expected header {:?}, got {:?}", OHLCV_HEADER.join(","), header.join(",")),
        });
    }

    let mut bars = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // header is row 1
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != OHLCV_HEADER.len() {
            return Err(Error::Parse {
                row,
                message: format!("expected 7 fields, found {}", record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], DATE_FORMAT).map_err(|e| Error::Parse {
            row,
            message: format!("bad date {:?}: {e}", &record[0]),
        })?;
        let price = |idx: usize| -> Result<T> {
            record[idx].parse::<T>().map_err(|_| Error::Parse {
                row,
                message: format!("bad {} value {:?}", OHLCV_HEADER[idx], &record[idx]),
            })
        };
        let volume = record[6].parse::<u64>().map_err(|_| Error::Parse {
            row,
            message: format!("bad Volume value {:?}", &record[6]),
        })?;
        bars.push(OhlcvBar {
            date,
            open: price(1)?,
            high: price(2)?,
            low: price(3)?,
            close: price(4)?,
            adj_close: price(5)?,
            volume,
        });
    }
    PriceSeries::new(instrument, bars)
}

/// Writes prices with the shortest decimal form that parses back to the same
/// value, so `parse ∘ serialize` is the identity.
pub fn serialize_ohlcv_csv<T: Scalar>(series: &PriceSeries<T>) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(&OHLCV_HEADER.join(","));
    out.push('\n');
    for b in series.bars() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            b.date.format(DATE_FORMAT),
            b.open,
            b.high,
            b.low,
            b.close,
            b.adj_close,
            b.volume
        );
    }
    out
}

pub fn read_ohlcv_file<T: Scalar>(path: &Path, instrument: InstrumentId) -> Result<PriceSeries<T>> {
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_ohlcv_csv(&raw, instrument)
}

pub fn write_ohlcv_file<T: Scalar>(path: &Path, series: &PriceSeries<T>) -> Result<()> {
    fs::write(path, serialize_ohlcv_csv(series)).map_err(|e| Error::io(path, e))
}
