use serde::{Deserialize, Serialize};

use super::{accuracy_on, train, ClassifierSpec, Matrix, ModelKind, TrainedClassifier};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seeding::derive_seed;

/// Ordered hyperparameter combinations for one model kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub kind: ModelKind,
    pub specs: Vec<ClassifierSpec>,
}

impl Grid {
    pub fn default_for(kind: ModelKind) -> Self {
        Grid {
            kind,
            specs: kind.default_grid(),
        }
    }

    pub fn single(spec: ClassifierSpec) -> Self {
        Grid {
            kind: spec.kind(),
            specs: vec![spec],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.specs.is_empty() {
            return Err(Error::Config(format!("grid for {} is empty", self.kind)));
        }
        for spec in &self.specs {
            if spec.kind() != self.kind {
                return Err(Error::Config(format!(
                    "grid for {} contains a {} spec",
                    self.kind,
                    spec.kind()
                )));
            }
            spec.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridTrial {
    pub canonical_id: String,
    /// Validation accuracy, or the training failure.
    pub outcome: std::result::Result<f64, String>,
}

#[derive(Clone, Debug)]
pub struct GridSearchOutcome<T> {
    pub spec: ClassifierSpec,
    pub model: TrainedClassifier<T>,
    pub validation_accuracy: f64,
    pub seed: u64,
    pub trials: Vec<GridTrial>,
}

/// Trains every combination on `learn`, keeps the one with the best validation
/// accuracy (earliest wins ties). Each combination's seed is
/// `derive_seed(master_seed, scope, canonical_id)`, so the returned model is the
/// same one a fresh training run with the winning spec would produce.
pub fn grid_search<T: Scalar>(
    grid: &Grid,
    learn: (&Matrix<T>, &[u8]),
    validation: (&Matrix<T>, &[u8]),
    master_seed: u64,
    scope: &str,
) -> Result<GridSearchOutcome<T>> {
    grid.validate()?;
    let mut best: Option<(usize, f64, TrainedClassifier<T>, u64)> = None;
    let mut trials = Vec::with_capacity(grid.specs.len());
    for (pos, spec) in grid.specs.iter().enumerate() {
        let id = spec.canonical_id();
        let seed = derive_seed(master_seed, scope, &id);
        let outcome = train(spec, learn.0, learn.1, seed)
            .and_then(|model| accuracy_on(&model, validation.0, validation.1).map(|acc| (model, acc)));
        match outcome {
            Ok((model, acc)) => {
                trials.push(GridTrial {
                    canonical_id: id,
                    outcome: Ok(acc),
                });
                if best.as_ref().is_none_or(|b| acc > b.1) {
                    best = Some((pos, acc, model, seed));
                }
            }
            Err(e) => trials.push(GridTrial {
                canonical_id: id,
                outcome: Err(e.to_string()),
            }),
        }
    }
    match best {
        Some((pos, acc, model, seed)) => Ok(GridSearchOutcome {
            spec: grid.specs[pos].clone(),
            model,
            validation_accuracy: acc,
            seed,
            trials,
        }),
        None => Err(Error::GridSearch(
            trials
                .iter()
                .map(|t| format!("{}: {}", t.canonical_id, t.outcome.as_ref().err().map_or("", |s| s)))
                .collect::<Vec<_>>()
                .join("; "),
        )),
    }
}
