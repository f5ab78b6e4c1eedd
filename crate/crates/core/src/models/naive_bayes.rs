use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::scalar::{sigmoid, Scalar};

/// Gaussian naive Bayes with per-class means and variances. Every variance is
/// widened by `var_smoothing * max feature variance`; when all features are
/// constant the widening falls back to `var_smoothing` itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb<T> {
    log_prior: [T; 2],
    mean: [Vec<T>; 2],
    var: [Vec<T>; 2],
}

fn column_stats<T: Scalar>(rows: &[&[T]], d: usize) -> (Vec<T>, Vec<T>) {
    let n = T::from_count(rows.len());
    let mut mean = vec![T::zero(); d];
    for r in rows {
        for j in 0..d {
            mean[j] += r[j];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![T::zero(); d];
    for r in rows {
        for j in 0..d {
            let c = r[j] - mean[j];
            var[j] += c * c;
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    (mean, var)
}

impl<T: Scalar> GaussianNb<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], var_smoothing: f64) -> Self {
        let d = x.n_cols();
        let all: Vec<&[T]> = x.rows().collect();
        let (_, overall_var) = column_stats(&all, d);
        let max_var = overall_var.iter().fold(T::zero(), |m, v| m.max(*v));
        let mut epsilon = T::lit(var_smoothing) * max_var;
        if !(epsilon > T::zero()) {
            epsilon = T::lit(var_smoothing);
        }

        let n = T::from_count(y.len());
        let mut log_prior = [T::zero(); 2];
        let mut mean: [Vec<T>; 2] = Default::default();
        let mut var: [Vec<T>; 2] = Default::default();
        for class in 0..2u8 {
            let rows: Vec<&[T]> = x
                .rows()
                .zip(y)
                .filter(|(_, &label)| label == class)
                .map(|(r, _)| r)
                .collect();
            let c = class as usize;
            log_prior[c] = (T::from_count(rows.len()) / n).ln();
            let (m, v) = column_stats(&rows, d);
            mean[c] = m;
            var[c] = v.into_iter().map(|v| v + epsilon).collect();
        }
        GaussianNb {
            log_prior,
            mean,
            var,
        }
    }

    fn joint_log_likelihood(&self, class: usize, x: &[T]) -> T {
        let two_pi = T::lit(std::f64::consts::TAU);
        let mut acc = self.log_prior[class];
        for ((v, m), s2) in x.iter().zip(&self.mean[class]).zip(&self.var[class]) {
            let diff = *v - *m;
            acc -= T::half() * ((two_pi * *s2).ln() + diff * diff / *s2);
        }
        acc
    }

    /// Posterior probability of class 1.
    pub fn score(&self, x: &[T]) -> T {
        sigmoid(self.joint_log_likelihood(1, x) - self.joint_log_likelihood(0, x))
    }
}
