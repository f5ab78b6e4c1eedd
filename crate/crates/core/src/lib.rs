//! Two-layer instrument/model pair selection.
//!
//! The first layer trains a zoo of directional classifiers per instrument on
//! technical-indicator features. Each trained pair is scored on its
//! validation window, and the score vectors are kept in an append-only record
//! store. The second layer is a majority-vote classifier fitted on that
//! history, which picks the pairs expected to be profitable. The picks are
//! then replayed on a held-out test segment.
//!
//! Numeric code is generic over [`scalar::Scalar`]; the aliases below fix it
//! to `f64`, which is what the pipeline and the command line use.

// `!(x > 0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod meta;
pub mod models;
pub mod pipeline;
pub mod scalar;
pub mod seeding;
pub mod splits;

pub use error::{Error, ErrorCategory, Result};
pub use scalar::Scalar;

pub type OhlcvBar = data::OhlcvBar<f64>;
pub type PriceSeries = data::PriceSeries<f64>;
pub type LabeledDataset = features::LabeledDataset<f64>;
pub type FeatureVector = features::FeatureVector<f64>;
pub type Matrix = models::Matrix<f64>;
pub type TrainedClassifier = models::TrainedClassifier<f64>;
pub type MetricSet = evaluation::MetricSet<f64>;
pub type EvaluationRecord = evaluation::EvaluationRecord<f64>;
pub type EquityCurve = evaluation::EquityCurve<f64>;
pub type MetaModel = meta::MetaModel<f64>;
pub type PairSelection = meta::PairSelection<f64>;
pub type RunReport = pipeline::RunReport<f64>;
