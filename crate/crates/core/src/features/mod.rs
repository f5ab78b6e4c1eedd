//! Per-day features, next-day direction labels, and the supervised dataset.

mod dataset;
mod indicators;

pub use dataset::{
    build_dataset, feature_frame_csv, FeatureParams, FeatureVector, LabeledDataset, LabeledSample,
    FEATURE_COUNT, FEATURE_NAMES,
};
pub use indicators::{compute_return, ema, macd, macd_line, rsi, sma, MacdPeriods, MacdSeries};

/// First sample index with the default indicator periods.
pub const DEFAULT_WARMUP: usize = 34;
