use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::dot;
use super::spec::LinearSvmParams;
use super::{Matrix, Standardizer};
use crate::scalar::{sigmoid, Scalar};

/// Hinge-loss linear SVM solved by dual coordinate descent.
///
/// The bias is learned as the weight of a constant feature, so it is
/// regularised together with the other weights. Coordinates are visited in a
/// seeded random order each epoch; training stops once the projected-gradient
/// spread drops below `tol` or after `max_iter` epochs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm<T> {
    scaler: Standardizer<T>,
    weights: Vec<T>,
    bias: T,
    epochs: usize,
}

impl<T: Scalar> LinearSvm<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: &LinearSvmParams, seed: u64) -> Self {
        let scaler = Standardizer::fit(x);
        let z = scaler.transform_matrix(x);
        let n = y.len();
        let d = z.n_cols();
        let c = T::lit(params.c);
        let tol = T::lit(params.tol);
        let sign: Vec<T> = y.iter().map(|&v| if v == 1 { T::one() } else { -T::one() }).collect();
        let q_diag: Vec<T> = z.rows().map(|r| dot(r, r) + T::one()).collect();

        let mut alpha = vec![T::zero(); n];
        let mut w = vec![T::zero(); d];
        let mut b = T::zero();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut epochs = 0;

        for epoch in 0..params.max_iter {
            epochs = epoch + 1;
            order.shuffle(&mut rng);
            let mut pg_max = T::neg_infinity();
            let mut pg_min = T::infinity();
            for &i in &order {
                let row = z.row(i);
                let g = sign[i] * (dot(&w, row) + b) - T::one();
                let pg = if alpha[i] == T::zero() {
                    g.min(T::zero())
                } else if alpha[i] == c {
                    g.max(T::zero())
                } else {
                    g
                };
                pg_max = pg_max.max(pg);
                pg_min = pg_min.min(pg);
                if pg != T::zero() {
                    let old = alpha[i];
                    alpha[i] = (old - g / q_diag[i]).max(T::zero()).min(c);
                    let delta = (alpha[i] - old) * sign[i];
                    for (wj, xj) in w.iter_mut().zip(row) {
                        *wj += delta * *xj;
                    }
                    b += delta;
                }
            }
            if pg_max - pg_min <= tol {
                break;
            }
        }
        LinearSvm {
            scaler,
            weights: w,
            bias: b,
            epochs,
        }
    }

    pub fn margin(&self, x: &[T]) -> T {
        dot(&self.weights, &self.scaler.transform(x)) + self.bias
    }

    /// Logistic squash of the margin; `>= 0.5` exactly when the margin is `>= 0`.
    pub fn score(&self, x: &[T]) -> T {
        sigmoid(self.margin(x))
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }
}
