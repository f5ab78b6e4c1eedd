use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::linalg::squared_distance;
use super::spec::{KNeighborsParams, NeighborWeights};
use super::{Matrix, Standardizer};
use crate::scalar::Scalar;

/// k-nearest neighbours on standardized features (Euclidean metric).
///
/// Training points at distance exactly zero decide the query on their own:
/// the score is their class-1 fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KNeighbors<T> {
    scaler: Standardizer<T>,
    points: Matrix<T>,
    labels: Vec<u8>,
    k: usize,
    weights: NeighborWeights,
}

impl<T: Scalar> KNeighbors<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: &KNeighborsParams) -> Self {
        let scaler = Standardizer::fit(x);
        let points = scaler.transform_matrix(x);
        KNeighbors {
            scaler,
            points,
            labels: y.to_vec(),
            k: params.n_neighbors.min(y.len()),
            weights: params.weights,
        }
    }

    pub fn score(&self, x: &[T]) -> T {
        let q = self.scaler.transform(x);
        let mut dist: Vec<(T, usize)> = self
            .points
            .rows()
            .enumerate()
            .map(|(i, p)| (squared_distance(p, &q), i))
            .collect();

        let exact: Vec<usize> = dist
            .iter()
            .filter(|(d, _)| *d == T::zero())
            .map(|(_, i)| *i)
            .collect();
        if !exact.is_empty() {
            let ones = exact.iter().filter(|&&i| self.labels[i] == 1).count();
            return T::from_count(ones) / T::from_count(exact.len());
        }

        let by_distance =
            |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by_distance);
            dist.truncate(self.k);
        }
        dist.sort_unstable_by(by_distance);

        let mut total = T::zero();
        let mut positive = T::zero();
        for (sq, i) in dist {
            let w = match self.weights {
                NeighborWeights::Uniform => T::one(),
                NeighborWeights::Distance => T::one() / sq.sqrt(),
            };
            total += w;
            if self.labels[i] == 1 {
                positive += w;
            }
        }
        positive / total
    }
}
