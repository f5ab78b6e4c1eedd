use serde::{Deserialize, Serialize};

use super::spec::GradientBoostingParams;
use super::tree::{grow_tree, Criterion, GrowParams, Tree};
use super::Matrix;
use crate::scalar::{sigmoid, Scalar};

/// Gradient boosting on the logistic loss: each stage fits a squared-error
/// tree to the residuals `y - p` and sets leaves to the Newton step
/// `Σ r / Σ p(1-p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting<T> {
    init: T,
    learning_rate: T,
    stages: Vec<Tree<T>>,
}

impl<T: Scalar> GradientBoosting<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: &GradientBoostingParams) -> Self {
        let n = y.len();
        let targets: Vec<T> = y.iter().map(|&v| T::from_u8(v).unwrap()).collect();
        let positive = targets.iter().copied().sum::<T>() / T::from_count(n);
        let init = (positive / (T::one() - positive)).ln();
        let learning_rate = T::lit(params.learning_rate);
        let grow = GrowParams {
            max_depth: params.max_depth,
            min_samples_split: params.min_samples_split,
            min_samples_leaf: params.min_samples_leaf,
            max_features: None,
        };

        let mut raw = vec![init; n];
        let mut stages = Vec::with_capacity(params.n_estimators);
        let mut prob = vec![T::zero(); n];
        let mut residual = vec![T::zero(); n];
        for _ in 0..params.n_estimators {
            for i in 0..n {
                prob[i] = sigmoid(raw[i]);
                residual[i] = targets[i] - prob[i];
            }
            let tree = grow_tree(
                x,
                &residual,
                (0..n).collect(),
                grow,
                Criterion::SquaredError,
                |leaf| {
                    let mut num = T::zero();
                    let mut den = T::zero();
                    for &i in leaf {
                        num += residual[i];
                        den += prob[i] * (T::one() - prob[i]);
                    }
                    if den.abs() < T::epsilon() * T::epsilon() {
                        T::zero()
                    } else {
                        num / den
                    }
                },
                None,
            );
            for (i, row) in x.rows().enumerate() {
                raw[i] += learning_rate * tree.evaluate(row);
            }
            stages.push(tree);
        }
        GradientBoosting {
            init,
            learning_rate,
            stages,
        }
    }

    pub fn margin(&self, x: &[T]) -> T {
        self.stages
            .iter()
            .fold(self.init, |acc, t| acc + self.learning_rate * t.evaluate(x))
    }

    pub fn score(&self, x: &[T]) -> T {
        sigmoid(self.margin(x))
    }

    pub fn stages(&self) -> &[Tree<T>] {
        &self.stages
    }

    pub fn init(&self) -> T {
        self.init
    }

    pub fn learning_rate(&self) -> T {
        self.learning_rate
    }
}
