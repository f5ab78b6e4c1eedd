use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::RandomForestParams;
use super::tree::{grow_tree, mean_of, Criterion, GrowParams, Tree};
use super::Matrix;
use crate::scalar::Scalar;

/// Bagged Gini trees with `floor(sqrt(d))` features tried per split.
/// The score is the fraction of trees voting for class 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest<T> {
    trees: Vec<Tree<T>>,
}

impl<T: Scalar> RandomForest<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: &RandomForestParams, seed: u64) -> Self {
        let n = y.len();
        let d = x.n_cols();
        let targets: Vec<T> = y.iter().map(|&v| T::from_u8(v).unwrap()).collect();
        let grow = GrowParams {
            max_depth: params.max_depth,
            min_samples_split: params.min_samples_split,
            min_samples_leaf: params.min_samples_leaf,
            max_features: Some(((d as f64).sqrt().floor() as usize).max(1)),
        };

        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let tree_seeds: Vec<u64> = (0..params.n_estimators).map(|_| master.random()).collect();

        let trees = tree_seeds
            .into_par_iter()
            .map(|tree_seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
                let idx: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                grow_tree(
                    x,
                    &targets,
                    idx,
                    grow,
                    Criterion::Gini,
                    |leaf| mean_of(&targets, leaf),
                    Some(&mut rng),
                )
            })
            .collect();
        RandomForest { trees }
    }

    pub fn trees(&self) -> &[Tree<T>] {
        &self.trees
    }

    /// Hard vote of one tree.
    pub fn tree_vote(tree: &Tree<T>, x: &[T]) -> bool {
        tree.evaluate(x) >= T::half()
    }

    pub fn score(&self, x: &[T]) -> T {
        let votes = self.trees.iter().filter(|t| Self::tree_vote(t, x)).count();
        T::from_count(votes) / T::from_count(self.trees.len())
    }
}
