//! The first layer: a zoo of directional classifiers, trained per instrument
//! and tuned by grid search on the validation segment.
//!
//! Every model exposes a class-1 score in `[0, 1]`; the hard prediction is
//! always `score >= 0.5`.

mod boosting;
mod forest;
mod grid;
mod kernel_svm;
mod knn;
mod linalg;
mod linear_svm;
mod logistic;
mod matrix;
mod mlp;
mod naive_bayes;
mod spec;
mod standardize;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{all_finite, Scalar};

pub use boosting::GradientBoosting;
pub use forest::RandomForest;
pub use grid::{grid_search, Grid, GridSearchOutcome, GridTrial};
pub use kernel_svm::KernelSvm;
pub use knn::KNeighbors;
pub use linear_svm::LinearSvm;
pub use logistic::LogisticRegression;
pub use matrix::Matrix;
pub use mlp::Mlp;
pub use naive_bayes::GaussianNb;
pub use spec::{
    ClassifierSpec, DecisionTreeParams, GaussianNbParams, GradientBoostingParams, KNeighborsParams,
    KernelSvmParams, LinearSvmParams, LogisticRegressionParams, MlpParams, ModelKind, NeighborWeights,
    RandomForestParams,
};
pub use standardize::Standardizer;
pub use tree::{DecisionTree, Node, Tree};

use tree::GrowParams;

const MODEL_FORMAT: &str = "pairsel-model/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FittedModel<T> {
    GradientBoosting(GradientBoosting<T>),
    LogisticRegression(LogisticRegression<T>),
    DecisionTree(DecisionTree<T>),
    RandomForest(RandomForest<T>),
    KNeighbors(KNeighbors<T>),
    GaussianNB(GaussianNb<T>),
    LinearSVM(LinearSvm<T>),
    MLP(Mlp<T>),
    KernelSVM(KernelSvm<T>),
}

impl<T: Scalar> FittedModel<T> {
    fn score_unchecked(&self, x: &[T]) -> T {
        match self {
            FittedModel::GradientBoosting(m) => m.score(x),
            FittedModel::LogisticRegression(m) => m.score(x),
            FittedModel::DecisionTree(m) => m.score(x),
            FittedModel::RandomForest(m) => m.score(x),
            FittedModel::KNeighbors(m) => m.score(x),
            FittedModel::GaussianNB(m) => m.score(x),
            FittedModel::LinearSVM(m) => m.score(x),
            FittedModel::MLP(m) => m.score(x),
            FittedModel::KernelSVM(m) => m.score(x),
        }
    }
}

/// A fitted, immutable predictor together with the spec that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier<T> {
    spec: ClassifierSpec,
    n_features: usize,
    model: FittedModel<T>,
}

#[derive(Serialize, Deserialize)]
struct Persisted<T> {
    format: String,
    classifier: TrainedClassifier<T>,
}

impl<T: Scalar> TrainedClassifier<T> {
    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind()
    }

    pub fn canonical_id(&self) -> String {
        self.spec.canonical_id()
    }

    pub fn model(&self) -> &FittedModel<T> {
        &self.model
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n_features,
            });
        }
        if !all_finite(x) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Class-1 score in `[0, 1]`.
    pub fn score(&self, x: &[T]) -> Result<T> {
        self.check_input(x)?;
        Ok(self.model.score_unchecked(x))
    }

    pub fn predict(&self, x: &[T]) -> Result<u8> {
        Ok(u8::from(self.score(x)? >= T::half()))
    }

    pub fn score_batch(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        x.rows().map(|r| self.score(r)).collect()
    }

    pub fn predict_batch(&self, x: &Matrix<T>) -> Result<Vec<u8>> {
        x.rows().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&Persisted {
            format: MODEL_FORMAT.to_string(),
            classifier: self.clone(),
        })
        .map_err(|e| Error::Persistence(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Persisted<T> = serde_json::from_str(text).map_err(|e| Error::Persistence(e.to_string()))?;
        if p.format != MODEL_FORMAT {
            return Err(Error::Persistence(format!(
                "unsupported model format {:?}, expected {MODEL_FORMAT:?}",
                p.format
            )));
        }
        Ok(p.classifier)
    }
}

fn check_training_data<T: Scalar>(x: &Matrix<T>, y: &[u8]) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.n_rows(),
            right: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::InsufficientLength {
            required: 1,
            actual: 0,
        });
    }
    if !all_finite(x.as_slice()) {
        return Err(Error::NonFinite);
    }
    if let Some(bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::Domain(format!("labels must be 0 or 1, found {bad}")));
    }
    let positives = y.iter().filter(|&&v| v == 1).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::DegenerateLabels(format!(
            "learn set of {} samples has a single class",
            y.len()
        )));
    }
    Ok(())
}

/// Fits `spec` on `(x, y)`. Deterministic in `(spec, x, y, seed)`.
pub fn train<T: Scalar>(spec: &ClassifierSpec, x: &Matrix<T>, y: &[u8], seed: u64) -> Result<TrainedClassifier<T>> {
    spec.validate()?;
    check_training_data(x, y)?;
    let model = match spec {
        ClassifierSpec::GradientBoosting(p) => FittedModel::GradientBoosting(GradientBoosting::fit(x, y, p)),
        ClassifierSpec::LogisticRegression(p) => {
            FittedModel::LogisticRegression(LogisticRegression::fit(x, y, p))
        }
        ClassifierSpec::DecisionTree(p) => FittedModel::DecisionTree(DecisionTree::fit(
            x,
            y,
            GrowParams {
                max_depth: p.max_depth,
                min_samples_split: p.min_samples_split,
                min_samples_leaf: p.min_samples_leaf,
                max_features: None,
            },
        )),
        ClassifierSpec::RandomForest(p) => FittedModel::RandomForest(RandomForest::fit(x, y, p, seed)),
        ClassifierSpec::KNeighbors(p) => FittedModel::KNeighbors(KNeighbors::fit(x, y, p)),
        ClassifierSpec::GaussianNB(p) => FittedModel::GaussianNB(GaussianNb::fit(x, y, p.var_smoothing)),
        ClassifierSpec::LinearSVM(p) => FittedModel::LinearSVM(LinearSvm::fit(x, y, p, seed)),
        ClassifierSpec::MLP(p) => FittedModel::MLP(Mlp::fit(x, y, p, seed)),
        ClassifierSpec::KernelSVM(p) => FittedModel::KernelSVM(KernelSvm::fit(x, y, p)),
    };
    Ok(TrainedClassifier {
        spec: spec.clone(),
        n_features: x.n_cols(),
        model,
    })
}

pub fn accuracy_on<T: Scalar>(model: &TrainedClassifier<T>, x: &Matrix<T>, y: &[u8]) -> Result<f64> {
    let preds = model.predict_batch(x)?;
    let correct = preds.iter().zip(y).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / y.len().max(1) as f64)
}
