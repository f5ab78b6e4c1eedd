use serde::{Deserialize, Serialize};

use super::linalg::{dot, solve};
use super::spec::LogisticRegressionParams;
use super::{Matrix, Standardizer};
use crate::scalar::{sigmoid, softplus, Scalar};

/// L2-regularised logistic regression fitted with damped Newton steps.
///
/// Minimises `0.5 |w|^2 + C Σ [log(1 + e^z) - y z]` with `z = w·x + b`; the
/// intercept is not penalised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression<T> {
    scaler: Standardizer<T>,
    weights: Vec<T>,
    intercept: T,
    iterations: usize,
}

fn objective<T: Scalar>(x: &Matrix<T>, y: &[T], c: T, theta: &[T]) -> T {
    let d = x.n_cols();
    let (w, b) = theta.split_at(d);
    let penalty = T::half() * dot(w, w);
    let loss = x
        .rows()
        .zip(y)
        .map(|(row, &t)| {
            let z = dot(w, row) + b[0];
            softplus(z) - t * z
        })
        .sum::<T>();
    penalty + c * loss
}

impl<T: Scalar> LogisticRegression<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: &LogisticRegressionParams) -> Self {
        let scaler = Standardizer::fit(x);
        let z = scaler.transform_matrix(x);
        let targets: Vec<T> = y.iter().map(|&v| T::from_u8(v).unwrap()).collect();
        let d = z.n_cols();
        let p = d + 1;
        let c = T::lit(params.c);
        let tol = T::lit(params.tol);

        let mut theta = vec![T::zero(); p];
        let mut current = objective(&z, &targets, c, &theta);
        let mut iterations = 0;
        for iter in 0..params.max_iter {
            iterations = iter + 1;
            let mut grad = vec![T::zero(); p];
            let mut hess = vec![T::zero(); p * p];
            for j in 0..d {
                grad[j] = theta[j];
                hess[j * p + j] = T::one();
            }
            // keeps the intercept row well-posed when probabilities saturate
            hess[d * p + d] = T::lit(1e-10);
            for (row, &t) in z.rows().zip(&targets) {
                let margin = dot(&theta[..d], row) + theta[d];
                let prob = sigmoid(margin);
                let r = c * (prob - t);
                let w = c * prob * (T::one() - prob);
                for a in 0..p {
                    let xa = if a < d { row[a] } else { T::one() };
                    grad[a] += r * xa;
                    for bcol in a..p {
                        let xb = if bcol < d { row[bcol] } else { T::one() };
                        hess[a * p + bcol] += w * xa * xb;
                    }
                }
            }
            for a in 0..p {
                for bcol in 0..a {
                    hess[a * p + bcol] = hess[bcol * p + a];
                }
            }
            let grad_norm = grad.iter().fold(T::zero(), |m, g| m.max(g.abs()));
            if grad_norm <= tol {
                break;
            }
            let mut rhs = grad.clone();
            let Some(step) = solve(&mut hess, &mut rhs) else {
                break;
            };

            // backtracking on the objective
            let mut scale = T::one();
            let mut accepted = false;
            let slope = -dot(&grad, &step);
            for _ in 0..40 {
                let trial: Vec<T> = theta.iter().zip(&step).map(|(t, s)| *t - scale * *s).collect();
                let value = objective(&z, &targets, c, &trial);
                if value <= current + T::lit(1e-4) * scale * slope {
                    theta = trial;
                    current = value;
                    accepted = true;
                    break;
                }
                scale *= T::half();
            }
            let step_norm = step.iter().fold(T::zero(), |m, s| m.max(s.abs())) * scale;
            if !accepted || step_norm <= tol {
                break;
            }
        }

        let intercept = theta[d];
        theta.truncate(d);
        LogisticRegression {
            scaler,
            weights: theta,
            intercept,
            iterations,
        }
    }

    pub fn margin(&self, x: &[T]) -> T {
        let z = self.scaler.transform(x);
        dot(&self.weights, &z) + self.intercept
    }

    pub fn score(&self, x: &[T]) -> T {
        sigmoid(self.margin(x))
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}
