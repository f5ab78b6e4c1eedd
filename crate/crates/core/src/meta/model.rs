use crate::data::InstrumentId;
use crate::error::{Error, Result};
use crate::evaluation::{EvaluationRecord, META_FEATURE_COUNT};
use crate::models::{train, ClassifierSpec, Matrix, ModelKind, TrainedClassifier};
use crate::scalar::Scalar;
use crate::seeding::derive_seed;

pub const DEFAULT_MIN_META_RECORDS: usize = 30;

/// Default voters: one linear, one tree and one instance-based model.
pub const DEFAULT_VOTERS: [ModelKind; 3] =
    [ModelKind::LogisticRegression, ModelKind::DecisionTree, ModelKind::KNeighbors];

/// Metric vectors of historical records with their profit labels.
#[derive(Clone, Debug)]
pub struct MetaDataset<T> {
    pub x: Matrix<T>,
    pub y: Vec<u8>,
    pub provenance: Vec<(InstrumentId, String)>,
}

impl<T: Scalar> MetaDataset<T> {
    pub fn from_records(records: &[EvaluationRecord<T>]) -> Self {
        MetaDataset {
            x: Matrix::from_rows(records.iter().map(|r| r.metrics.meta_features())),
            y: records.iter().map(|r| r.profit_label).collect(),
            provenance: records.iter().map(|r| (r.instrument.clone(), r.model.clone())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Hard-majority vote over an odd number of classifiers.
#[derive(Clone, Debug)]
pub struct MetaModel<T> {
    voters: Vec<TrainedClassifier<T>>,
    trained_on: usize,
}

impl<T: Scalar> MetaModel<T> {
    pub fn voters(&self) -> &[TrainedClassifier<T>] {
        &self.voters
    }

    /// Number of records the voters were fitted on.
    pub fn trained_on(&self) -> usize {
        self.trained_on
    }

    pub fn votes(&self, features: &[T]) -> Result<Vec<u8>> {
        self.voters.iter().map(|v| v.predict(features)).collect()
    }

    pub fn predict(&self, features: &[T]) -> Result<u8> {
        let ones = self.votes(features)?.iter().filter(|&&v| v == 1).count();
        Ok(u8::from(2 * ones > self.voters.len()))
    }

    /// Mean of the voters' scores. Only used for ordering.
    pub fn score(&self, features: &[T]) -> Result<T> {
        let mut sum = T::zero();
        for v in &self.voters {
            sum += v.score(features)?;
        }
        Ok(sum / T::from_count(self.voters.len()))
    }
}

/// Fits the default voters on every record in `history`.
pub fn train_meta<T: Scalar>(history: &[EvaluationRecord<T>], seed: u64, min_records: usize) -> Result<MetaModel<T>> {
    let specs: Vec<ClassifierSpec> = DEFAULT_VOTERS.iter().map(|k| k.default_spec()).collect();
    train_meta_with(history, seed, min_records, &specs)
}

pub fn train_meta_with<T: Scalar>(
    history: &[EvaluationRecord<T>],
    seed: u64,
    min_records: usize,
    voters: &[ClassifierSpec],
) -> Result<MetaModel<T>> {
    if voters.is_empty() || voters.len().is_multiple_of(2) {
        return Err(Error::Config(format!("need an odd number of voters, got {}", voters.len())));
    }
    if history.len() < min_records.max(1) {
        return Err(Error::InsufficientMetaHistory(format!(
            "{} records, at least {min_records} required",
            history.len()
        )));
    }
    let data = MetaDataset::from_records(history);
    debug_assert_eq!(data.x.n_cols(), META_FEATURE_COUNT);
    let positives = data.y.iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::InsufficientMetaHistory(format!(
            "all {} records share profit label {}",
            data.len(),
            data.y[0]
        )));
    }
    let voters = voters
        .iter()
        .map(|spec| train(spec, &data.x, &data.y, derive_seed(seed, "meta", &spec.canonical_id())))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetaModel {
        voters,
        trained_on: data.len(),
    })
}

/// `2p - 1`: the expected value of a ±1 vote that is right with probability `p`.
/// Evaluated in percent units so that decimal inputs such as 0.8 land on the
/// nearest double of the decimal answer.
pub fn mean_system_accuracy<T: Scalar>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Domain(format!("layer-2 accuracy {p} is outside [0, 1]")));
    }
    Ok((T::lit(200.0) * p - T::hundred()) / T::hundred())
}
