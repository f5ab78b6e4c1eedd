//! Model kinds, their hyperparameters, and the default search grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    GradientBoosting,
    LogisticRegression,
    DecisionTree,
    RandomForest,
    KNeighbors,
    GaussianNB,
    LinearSVM,
    MLP,
    KernelSVM,
}

impl ModelKind {
    pub const ALL: [ModelKind; 9] = [
        ModelKind::GradientBoosting,
        ModelKind::LogisticRegression,
        ModelKind::DecisionTree,
        ModelKind::RandomForest,
        ModelKind::KNeighbors,
        ModelKind::GaussianNB,
        ModelKind::LinearSVM,
        ModelKind::MLP,
        ModelKind::KernelSVM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::GradientBoosting => "GradientBoosting",
            ModelKind::LogisticRegression => "LogisticRegression",
            ModelKind::DecisionTree => "DecisionTree",
            ModelKind::RandomForest => "RandomForest",
            ModelKind::KNeighbors => "KNeighbors",
            ModelKind::GaussianNB => "GaussianNB",
            ModelKind::LinearSVM => "LinearSVM",
            ModelKind::MLP => "MLP",
            ModelKind::KernelSVM => "KernelSVM",
        }
    }

    /// Abbreviation accepted wherever a kind is parsed from text.
    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::GradientBoosting => "gb",
            ModelKind::LogisticRegression => "lr",
            ModelKind::DecisionTree => "dt",
            ModelKind::RandomForest => "rf",
            ModelKind::KNeighbors => "knn",
            ModelKind::GaussianNB => "gnb",
            ModelKind::LinearSVM => "svm",
            ModelKind::MLP => "mlp",
            ModelKind::KernelSVM => "ksvm",
        }
    }

    /// Kinds whose inputs are standardized inside the model.
    pub fn is_scale_sensitive(self) -> bool {
        matches!(
            self,
            ModelKind::LogisticRegression
                | ModelKind::LinearSVM
                | ModelKind::KernelSVM
                | ModelKind::MLP
                | ModelKind::KNeighbors
        )
    }

    pub fn default_spec(self) -> ClassifierSpec {
        match self {
            ModelKind::GradientBoosting => ClassifierSpec::GradientBoosting(Default::default()),
            ModelKind::LogisticRegression => ClassifierSpec::LogisticRegression(Default::default()),
            ModelKind::DecisionTree => ClassifierSpec::DecisionTree(Default::default()),
            ModelKind::RandomForest => ClassifierSpec::RandomForest(Default::default()),
            ModelKind::KNeighbors => ClassifierSpec::KNeighbors(Default::default()),
            ModelKind::GaussianNB => ClassifierSpec::GaussianNB(Default::default()),
            ModelKind::LinearSVM => ClassifierSpec::LinearSVM(Default::default()),
            ModelKind::MLP => ClassifierSpec::MLP(Default::default()),
            ModelKind::KernelSVM => ClassifierSpec::KernelSVM(Default::default()),
        }
    }

    /// Three values per tuned hyperparameter, bracketing the default.
    pub fn default_grid(self) -> Vec<ClassifierSpec> {
        match self {
            ModelKind::GradientBoosting => [6, 12, 18]
                .map(|max_depth| {
                    ClassifierSpec::GradientBoosting(GradientBoostingParams {
                        max_depth,
                        ..Default::default()
                    })
                })
                .to_vec(),
            ModelKind::LogisticRegression => [0.01, 0.1, 1.0]
                .map(|c| {
                    ClassifierSpec::LogisticRegression(LogisticRegressionParams {
                        c,
                        ..Default::default()
                    })
                })
                .to_vec(),
            ModelKind::DecisionTree => [6, 12, 18]
                .map(|max_depth| {
                    ClassifierSpec::DecisionTree(DecisionTreeParams {
                        max_depth,
                        ..Default::default()
                    })
                })
                .to_vec(),
            ModelKind::RandomForest => [100, 300, 500]
                .map(|n_estimators| {
                    ClassifierSpec::RandomForest(RandomForestParams {
                        n_estimators,
                        ..Default::default()
                    })
                })
                .to_vec(),
            ModelKind::KNeighbors => [3, 7, 11]
                .map(|n_neighbors| {
                    ClassifierSpec::KNeighbors(KNeighborsParams {
                        n_neighbors,
                        ..Default::default()
                    })
                })
                .to_vec(),
            ModelKind::GaussianNB => [1e-10, 1e-9, 1e-8]
                .map(|var_smoothing| ClassifierSpec::GaussianNB(GaussianNbParams { var_smoothing }))
                .to_vec(),
            ModelKind::LinearSVM => [0.1, 1.0, 10.0]
                .map(|c| {
                    ClassifierSpec::LinearSVM(LinearSvmParams {
                        c,
                        ..Default::default()
                    })
                })
                .to_vec(),
            ModelKind::MLP => [32, 69, 128]
                .map(|hidden| {
                    ClassifierSpec::MLP(MlpParams {
                        hidden,
                        ..Default::default()
                    })
                })
                .to_vec(),
            ModelKind::KernelSVM => [0.1, 1.0, 10.0]
                .map(|c| {
                    ClassifierSpec::KernelSVM(KernelSvmParams {
                        c,
                        ..Default::default()
                    })
                })
                .to_vec(),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()) || k.short_name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown model kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradientBoostingParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for GradientBoostingParams {
    fn default() -> Self {
        GradientBoostingParams {
            n_estimators: 100,
            learning_rate: 0.01,
            max_depth: 12,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticRegressionParams {
    /// Inverse L2 strength.
    #[serde(rename = "C")]
    pub c: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogisticRegressionParams {
    fn default() -> Self {
        LogisticRegressionParams {
            c: 0.1,
            max_iter: 10_000,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionTreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for DecisionTreeParams {
    fn default() -> Self {
        DecisionTreeParams {
            max_depth: 12,
            min_samples_split: 6,
            min_samples_leaf: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
}

impl Default for RandomForestParams {
    fn default() -> Self {
        RandomForestParams {
            n_estimators: 500,
            max_depth: 10,
            min_samples_split: 2,
            min_samples_leaf: 1,
            bootstrap: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborWeights {
    Uniform,
    Distance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KNeighborsParams {
    pub n_neighbors: usize,
    pub weights: NeighborWeights,
}

impl Default for KNeighborsParams {
    fn default() -> Self {
        KNeighborsParams {
            n_neighbors: 7,
            weights: NeighborWeights::Distance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianNbParams {
    pub var_smoothing: f64,
}

impl Default for GaussianNbParams {
    fn default() -> Self {
        GaussianNbParams { var_smoothing: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearSvmParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LinearSvmParams {
    fn default() -> Self {
        LinearSvmParams {
            c: 1.0,
            max_iter: 10_000,
            tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden: usize,
    pub alpha: f64,
    pub max_iter: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub tol: f64,
    pub patience: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: 69,
            alpha: 1e-4,
            max_iter: 10_000,
            learning_rate: 1e-3,
            batch_size: 200,
            tol: 1e-6,
            patience: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSvmParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KernelSvmParams {
    fn default() -> Self {
        KernelSvmParams {
            c: 1.0,
            max_iter: 5_000,
            tol: 1e-3,
        }
    }
}

/// A model kind together with its hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ClassifierSpec {
    GradientBoosting(GradientBoostingParams),
    LogisticRegression(LogisticRegressionParams),
    DecisionTree(DecisionTreeParams),
    RandomForest(RandomForestParams),
    KNeighbors(KNeighborsParams),
    GaussianNB(GaussianNbParams),
    LinearSVM(LinearSvmParams),
    MLP(MlpParams),
    KernelSVM(KernelSvmParams),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be at least {min}, got {v}")))
    }
}

impl ClassifierSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ClassifierSpec::GradientBoosting(_) => ModelKind::GradientBoosting,
            ClassifierSpec::LogisticRegression(_) => ModelKind::LogisticRegression,
            ClassifierSpec::DecisionTree(_) => ModelKind::DecisionTree,
            ClassifierSpec::RandomForest(_) => ModelKind::RandomForest,
            ClassifierSpec::KNeighbors(_) => ModelKind::KNeighbors,
            ClassifierSpec::GaussianNB(_) => ModelKind::GaussianNB,
            ClassifierSpec::LinearSVM(_) => ModelKind::LinearSVM,
            ClassifierSpec::MLP(_) => ModelKind::MLP,
            ClassifierSpec::KernelSVM(_) => ModelKind::KernelSVM,
        }
    }

    /// Stable textual identity, e.g. `LogisticRegression(C=0.1;max_iter=10000;tol=0.000001)`.
    /// Never contains a comma.
    pub fn canonical_id(&self) -> String {
        let fields: Vec<String> = match self {
            ClassifierSpec::GradientBoosting(p) => vec![
                format!("n_estimators={}", p.n_estimators),
                format!("learning_rate={}", p.learning_rate),
                format!("max_depth={}", p.max_depth),
                format!("min_samples_split={}", p.min_samples_split),
                format!("min_samples_leaf={}", p.min_samples_leaf),
            ],
            ClassifierSpec::LogisticRegression(p) => vec![
                format!("C={}", p.c),
                format!("max_iter={}", p.max_iter),
                format!("tol={}", p.tol),
            ],
            ClassifierSpec::DecisionTree(p) => vec![
                format!("max_depth={}", p.max_depth),
                format!("min_samples_split={}", p.min_samples_split),
                format!("min_samples_leaf={}", p.min_samples_leaf),
            ],
            ClassifierSpec::RandomForest(p) => vec![
                format!("n_estimators={}", p.n_estimators),
                format!("max_depth={}", p.max_depth),
                format!("min_samples_split={}", p.min_samples_split),
                format!("min_samples_leaf={}", p.min_samples_leaf),
                format!("bootstrap={}", p.bootstrap),
            ],
            ClassifierSpec::KNeighbors(p) => vec![
                format!("n_neighbors={}", p.n_neighbors),
                format!(
                    "weights={}",
                    match p.weights {
                        NeighborWeights::Uniform => "uniform",
                        NeighborWeights::Distance => "distance",
                    }
                ),
            ],
            ClassifierSpec::GaussianNB(p) => vec![format!("var_smoothing={}", p.var_smoothing)],
            ClassifierSpec::LinearSVM(p) => vec![
                format!("C={}", p.c),
                format!("max_iter={}", p.max_iter),
                format!("tol={}", p.tol),
            ],
            ClassifierSpec::MLP(p) => vec![
                format!("hidden={}", p.hidden),
                format!("alpha={}", p.alpha),
                format!("max_iter={}", p.max_iter),
                format!("learning_rate={}", p.learning_rate),
                format!("batch_size={}", p.batch_size),
                format!("tol={}", p.tol),
                format!("patience={}", p.patience),
            ],
            ClassifierSpec::KernelSVM(p) => vec![
                format!("C={}", p.c),
                "kernel=rbf".to_string(),
                "gamma=scale".to_string(),
                format!("max_iter={}", p.max_iter),
                format!("tol={}", p.tol),
            ],
        };
        format!("{}({})", self.kind().name(), fields.join(";"))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierSpec::GradientBoosting(p) => {
                at_least("n_estimators", p.n_estimators, 1)?;
                positive("learning_rate", p.learning_rate)?;
                at_least("max_depth", p.max_depth, 1)?;
                at_least("min_samples_split", p.min_samples_split, 2)?;
                at_least("min_samples_leaf", p.min_samples_leaf, 1)
            }
            ClassifierSpec::LogisticRegression(p) => {
                positive("C", p.c)?;
                at_least("max_iter", p.max_iter, 1)?;
                positive("tol", p.tol)
            }
            ClassifierSpec::DecisionTree(p) => {
                at_least("max_depth", p.max_depth, 1)?;
                at_least("min_samples_split", p.min_samples_split, 2)?;
                at_least("min_samples_leaf", p.min_samples_leaf, 1)
            }
            ClassifierSpec::RandomForest(p) => {
                at_least("n_estimators", p.n_estimators, 1)?;
                at_least("max_depth", p.max_depth, 1)?;
                at_least("min_samples_split", p.min_samples_split, 2)?;
                at_least("min_samples_leaf", p.min_samples_leaf, 1)
            }
            ClassifierSpec::KNeighbors(p) => at_least("n_neighbors", p.n_neighbors, 1),
            ClassifierSpec::GaussianNB(p) => positive("var_smoothing", p.var_smoothing),
            ClassifierSpec::LinearSVM(p) => {
                positive("C", p.c)?;
                at_least("max_iter", p.max_iter, 1)?;
                positive("tol", p.tol)
            }
            ClassifierSpec::MLP(p) => {
                at_least("hidden", p.hidden, 1)?;
                if !(p.alpha >= 0.0 && p.alpha.is_finite()) {
                    return Err(Error::Config(format!("alpha must be non-negative, got {}", p.alpha)));
                }
                at_least("max_iter", p.max_iter, 1)?;
                positive("learning_rate", p.learning_rate)?;
                at_least("batch_size", p.batch_size, 1)?;
                positive("tol", p.tol)
            }
            ClassifierSpec::KernelSVM(p) => {
                positive("C", p.c)?;
                at_least("max_iter", p.max_iter, 1)?;
                positive("tol", p.tol)
            }
        }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_id())
    }
}
